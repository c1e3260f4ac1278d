#pragma once

#include <set>
#include <string>
#include <vector>

#include "repograph/config.hpp"
#include "repograph/graph.hpp"

namespace repograph {

struct LexicalMatch {
    std::string path;
    int line = 0;
    int column = 0;
    std::string matched_text;
};

struct AnchorSet {
    std::vector<NodeId> anchors; // deduplicated, ordered by first (path, line)
    int step_index = 0;
    int dropped_matches = 0;
};

// Bounded accumulated context. Members only grow: admission stops when the
// budget runs out but nothing is ever evicted.
struct Context {
    std::vector<NodeId> members; // insertion order
    std::set<NodeId> member_set;
    int budget_units = 100000;
    int units_used = 0;
    bool saturated = false;

    bool contains(const NodeId& n) const { return member_set.count(n) > 0; }
    size_t size() const { return members.size(); }
};

// The display line used for budget accounting; cost is its length capped
// at cfg.node_render_cap characters.
std::string render_node_line(const NodeId& n);
int render_cost(const NodeId& n, const ExpansionConfig& cfg);

// Maps lexical matches to their innermost symbol nodes, deduplicates,
// and truncates to the anchor cap.
AnchorSet align_matches(const std::vector<LexicalMatch>& matches, const RepoGraph& g, int cap);

// score = path_confidence * decay^(d-1) * (1 + bonus * same_community),
// zeroed for nodes already in the context.
double score_neighbor(const NodeId& u, const NodeId& anchor, int distance, double path_confidence,
                      const Context& ctx, const CommunityAssignment& comm,
                      const ExpansionConfig& cfg);

// Top-k scored members of the confidence-filtered K-hop neighborhood;
// ties break on (path, qualified_name), zero scores are dropped.
std::vector<std::pair<NodeId, double>> select_neighbors(const NodeId& v, const RepoGraph& g,
                                                        const Context& ctx,
                                                        const CommunityAssignment& comm,
                                                        const ExpansionConfig& cfg);

struct GammaEntry {
    NodeId node;
    double score = 0.0;
    NodeId source_anchor;
};

// Union of per-anchor selections; a node reachable from several anchors
// keeps its best score. |result| <= anchors * k.
std::vector<GammaEntry> expand(const AnchorSet& anchor_set, const RepoGraph& g, const Context& ctx,
                               const CommunityAssignment& comm, const ExpansionConfig& cfg);

// Admits anchors first (in anchor order), then gamma by descending score,
// charging each node's rendering cost against the budget. Prior members
// are never touched.
Context fold_context(const Context& ctx, const AnchorSet& anchor_set,
                     const std::vector<GammaEntry>& gamma, const ExpansionConfig& cfg);

} // namespace repograph
