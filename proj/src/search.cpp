#include "repograph/search.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "repograph/json_io.hpp"

namespace repograph {

std::vector<LexicalMatch> regex_search(const std::filesystem::path& root,
                                       const std::vector<std::string>& files,
                                       const std::string& pattern) {
    std::regex re;
    try {
        re = std::regex(pattern);
    } catch (const std::regex_error& e) {
        raise(Errc::invalid_argument, std::string("invalid regex: ") + e.what());
    }
    std::vector<LexicalMatch> out;
    for (const std::string& rel : files) { // files arrive sorted by path
        std::string content;
        try {
            content = read_text_file(root / rel);
        } catch (const Error&) {
            continue; // racing deletion; the next align will catch up
        }
        std::istringstream ss(content);
        std::string line;
        int line_no = 0;
        while (std::getline(ss, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::smatch m;
            if (std::regex_search(line, m, re))
                out.push_back({rel, line_no, static_cast<int>(m.position(0)), line});
        }
    }
    return out;
}

std::string render_match_lines(const std::vector<LexicalMatch>& matches) {
    std::string out;
    for (const LexicalMatch& m : matches)
        out += m.path + ":" + std::to_string(m.line) + ":" + m.matched_text + "\n";
    return out;
}

std::string render_neighbor_entry(const NeighborRef& n) {
    std::string entry = n.path;
    if (!n.symbol.empty()) entry += ":" + n.symbol;
    entry += " [" + format_confidence(n.confidence) + "]";
    return entry;
}

std::vector<std::string> evidence_section_files(const std::vector<GammaEntry>& gamma) {
    std::map<std::string, double> best;
    for (const GammaEntry& e : gamma) {
        auto it = best.find(e.node.path);
        if (it == best.end() || e.score > it->second) best[e.node.path] = e.score;
    }
    std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    for (const auto& [path, _] : ranked) out.push_back(path);
    return out;
}

namespace {

void render_list(std::string& out, const std::string& label,
                 const std::vector<NeighborRef>& refs, int cap) {
    if (refs.empty()) return;
    std::string pad(4, ' ');
    std::string head = pad + label;
    head.resize(14, ' '); // value column starts at 14, matching the flow line
    out += head;
    int shown = std::min<int>(cap, static_cast<int>(refs.size()));
    for (int i = 0; i < shown; ++i) {
        if (i > 0) out += std::string(14, ' ');
        out += render_neighbor_entry(refs[static_cast<size_t>(i)]);
        if (i + 1 < shown) out += ",";
        out += "\n";
    }
}

} // namespace

std::string render_evidence_block(const std::vector<GammaEntry>& gamma,
                                  const std::vector<SidecarRecord>& sections,
                                  int entries_per_list) {
    (void)gamma;
    std::string out = "[Related files from dependency graph]\n";
    for (const SidecarRecord& rec : sections) {
        out += "  " + rec.path + " (cluster: " + rec.community_label + "):\n";
        render_list(out, "Callers:", rec.callers, entries_per_list);
        render_list(out, "Callees:", rec.callees, entries_per_list);
        if (!rec.flows.empty()) {
            const FlowStep& f = rec.flows.front();
            out += "    Flow:     " + f.name + " (step " + std::to_string(f.step) + "/" +
                   std::to_string(f.of) + ")\n";
        }
    }
    return out;
}

} // namespace repograph
