#include "repograph/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "repograph/errors.hpp"

namespace repograph {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string body = v;
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']')
        body = body.substr(1, body.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unquote(trim(item));
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_bool(const std::string& v) {
    return v == "true" || v == "1" || v == "yes" || v == "on";
}

} // namespace

IndexConfig parse_config_text(const std::string& text) {
    IndexConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string value = unquote(trim(line.substr(eq + 1)));
        if (key == "include") cfg.include_globs = split_list(value);
        else if (key == "exclude") cfg.exclude_globs = split_list(value);
        else if (key == "drop_tests") cfg.drop_tests = parse_bool(value);
        else if (key == "adapters") cfg.adapters = split_list(value);
        else if (key == "sidecar_cap") cfg.sidecar_cap = std::stoi(value);
        else if (key == "flow_max_len") cfg.flow_max_len = std::stoi(value);
        else if (key == "community_seed") cfg.community_seed = std::stoi(value);
        else if (key == "leiden_resolution") cfg.leiden_resolution = std::stod(value);
        else if (key == "stale_threshold") cfg.stale_threshold = std::stod(value);
        else if (key == "k") cfg.expansion.k = std::stoi(value);
        else if (key == "theta") cfg.expansion.theta = std::stod(value);
        else if (key == "hops") cfg.expansion.hops = std::stoi(value);
        else if (key == "anchors") cfg.expansion.anchor_cap = std::stoi(value);
        else if (key == "budget") cfg.expansion.budget_units = std::stoi(value);
        else if (key == "decay") cfg.expansion.decay = std::stod(value);
        else if (key == "community_bonus") cfg.expansion.community_bonus = std::stod(value);
        // unknown keys are ignored so configs stay forward compatible
    }
    return cfg;
}

IndexConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) return IndexConfig{};
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

bool glob_match(const std::string& pattern, const std::string& path) {
    // `**` crosses '/', `*` and `?` do not; `**/` also matches zero segments
    static thread_local std::map<std::string, std::regex> cache;
    auto it = cache.find(pattern);
    if (it == cache.end()) {
        std::string re;
        for (size_t i = 0; i < pattern.size(); ++i) {
            char c = pattern[i];
            if (c == '*' && i + 1 < pattern.size() && pattern[i + 1] == '*') {
                if (i + 2 < pattern.size() && pattern[i + 2] == '/') {
                    re += "(?:.*/)?";
                    i += 2;
                } else {
                    re += ".*";
                    ++i;
                }
            } else if (c == '*') {
                re += "[^/]*";
            } else if (c == '?') {
                re += "[^/]";
            } else if (std::string("\\^$.|+()[]{}").find(c) != std::string::npos) {
                re += '\\';
                re += c;
            } else {
                re += c;
            }
        }
        it = cache.emplace(pattern, std::regex(re)).first;
    }
    return std::regex_match(path, it->second);
}

std::filesystem::path repograph_dir(const std::filesystem::path& repo_root) {
    if (const char* env = std::getenv("REPOGRAPH_DIR")) {
        std::filesystem::path p(env);
        if (p.is_absolute()) return p;
        return repo_root / p;
    }
    return repo_root / ".repograph";
}

} // namespace repograph
