#include "repograph/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace repograph {

std::string render_node_line(const NodeId& n) {
    if (!n.is_symbol()) return n.path;
    return n.path + ":" + n.qualified_name;
}

int render_cost(const NodeId& n, const ExpansionConfig& cfg) {
    int len = static_cast<int>(render_node_line(n).size());
    return std::min(len, cfg.node_render_cap);
}

AnchorSet align_matches(const std::vector<LexicalMatch>& matches, const RepoGraph& g, int cap) {
    std::vector<LexicalMatch> ordered = matches;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const LexicalMatch& a, const LexicalMatch& b) {
                         if (a.path != b.path) return a.path < b.path;
                         if (a.line != b.line) return a.line < b.line;
                         return a.column < b.column;
                     });
    AnchorSet out;
    std::set<NodeId> seen;
    for (const LexicalMatch& m : ordered) {
        if (!g.find_file(m.path)) {
            ++out.dropped_matches;
            continue;
        }
        NodeId anchor = g.node_for_location(m.path, m.line);
        if (seen.insert(anchor).second) {
            if (static_cast<int>(out.anchors.size()) < cap) out.anchors.push_back(anchor);
        }
    }
    return out;
}

double score_neighbor(const NodeId& u, const NodeId& anchor, int distance, double path_confidence,
                      const Context& ctx, const CommunityAssignment& comm,
                      const ExpansionConfig& cfg) {
    if (ctx.contains(u)) return 0.0;
    double score = path_confidence * std::pow(cfg.decay, distance - 1);
    auto cu = comm.kappa.find(u.path);
    auto cv = comm.kappa.find(anchor.path);
    if (cu != comm.kappa.end() && cv != comm.kappa.end() && cu->second == cv->second)
        score *= 1.0 + cfg.community_bonus;
    return score;
}

std::vector<std::pair<NodeId, double>> select_neighbors(const NodeId& v, const RepoGraph& g,
                                                        const Context& ctx,
                                                        const CommunityAssignment& comm,
                                                        const ExpansionConfig& cfg) {
    std::vector<std::pair<NodeId, double>> scored;
    for (const NeighborHit& hit : g.neighborhood(v, cfg.hops, cfg.theta)) {
        double s = score_neighbor(hit.node, v, hit.distance, hit.path_confidence, ctx, comm, cfg);
        if (s > 0.0) scored.push_back({hit.node, s});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        if (a.first.path != b.first.path) return a.first.path < b.first.path;
        return a.first.qualified_name < b.first.qualified_name;
    });
    if (static_cast<int>(scored.size()) > cfg.k) scored.resize(static_cast<size_t>(cfg.k));
    return scored;
}

std::vector<GammaEntry> expand(const AnchorSet& anchor_set, const RepoGraph& g, const Context& ctx,
                               const CommunityAssignment& comm, const ExpansionConfig& cfg) {
    std::map<NodeId, GammaEntry> best;
    for (const NodeId& anchor : anchor_set.anchors) {
        for (const auto& [node, score] : select_neighbors(anchor, g, ctx, comm, cfg)) {
            auto it = best.find(node);
            if (it == best.end() || score > it->second.score)
                best[node] = GammaEntry{node, score, anchor};
        }
    }
    std::vector<GammaEntry> out;
    out.reserve(best.size());
    for (auto& [_, entry] : best) out.push_back(std::move(entry));
    std::sort(out.begin(), out.end(), [](const GammaEntry& a, const GammaEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.node.path != b.node.path) return a.node.path < b.node.path;
        return a.node.qualified_name < b.node.qualified_name;
    });
    return out;
}

Context fold_context(const Context& ctx, const AnchorSet& anchor_set,
                     const std::vector<GammaEntry>& gamma, const ExpansionConfig& cfg) {
    Context next = ctx;
    bool open = true;
    auto admit = [&](const NodeId& n) {
        if (!open || next.contains(n)) return;
        int cost = render_cost(n, cfg);
        if (next.units_used + cost > next.budget_units) {
            next.saturated = true;
            open = false; // budget exhausted: no further admissions this step
            return;
        }
        next.units_used += cost;
        next.members.push_back(n);
        next.member_set.insert(n);
    };
    for (const NodeId& a : anchor_set.anchors) admit(a);
    for (const GammaEntry& e : gamma) admit(e.node);
    return next;
}

} // namespace repograph
