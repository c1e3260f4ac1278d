#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repograph/errors.hpp"

namespace repograph {

enum class NodeKind { directory, file, class_, function };
enum class RelationKind { contains, imports, invokes, inherits, tested_by, documents, configures };
enum class Provenance {
    same_file_cooccurrence,
    explicit_import,
    resolved_import,
    inheritance,
    cython_implementation,
    test_linkage,
    documentation,
    configuration,
    fuzzy_name_match,
    structural,
};

const char* to_string(NodeKind k);
const char* to_string(RelationKind r);
const char* to_string(Provenance p);
NodeKind node_kind_from_string(const std::string& s);
RelationKind relation_from_string(const std::string& s);
Provenance provenance_from_string(const std::string& s);

// Fixed per-provenance reliability weight. Total over the enum.
double confidence_of(Provenance p);

// Two-decimal rendering with the trailing zero trimmed: 1.0, 0.95, 0.9.
std::string format_confidence(double c);

struct Span {
    int start = 0;
    int end = 0;
    auto operator<=>(const Span&) const = default;
};

// Identity of one graph node within a snapshot. Span participates in
// identity so same-named overloads in one file stay distinct.
struct NodeId {
    std::string path;
    NodeKind kind = NodeKind::file;
    std::string qualified_name;
    Span span;

    auto operator<=>(const NodeId&) const = default;

    bool is_symbol() const { return kind == NodeKind::class_ || kind == NodeKind::function; }
    bool is_code_bearing() const { return kind != NodeKind::directory; }

    // Canonical string form used as a JSON key and in manifests, e.g.
    // "func:pkg/mod.py#Cls.method@10-20".
    std::string key() const;
    static NodeId from_key(const std::string& key);

    static NodeId directory(std::string path);
    static NodeId file(std::string path);
    static NodeId symbol(NodeKind kind, std::string path, std::string qualified_name, Span span);
};

struct Edge {
    NodeId src;
    RelationKind relation = RelationKind::contains;
    NodeId dst;
    Provenance provenance = Provenance::structural;
    double confidence = 1.0;

    auto operator<=>(const Edge&) const = default;

    bool is_semantic() const { return relation != RelationKind::contains; }
    bool is_cross_artifact() const {
        return relation == RelationKind::tested_by || relation == RelationKind::documents ||
               relation == RelationKind::configures;
    }
};

Edge make_edge(NodeId src, RelationKind relation, NodeId dst, Provenance provenance);

// File-level community partition. kappa/cohesion are keyed by file path;
// file paths identify file nodes uniquely within a snapshot.
struct CommunityAssignment {
    std::map<std::string, int> kappa;
    std::map<int, std::string> labels;
    std::map<std::string, double> cohesion;
    bool stale = false;

    bool operator==(const CommunityAssignment&) const = default;
};

struct NeighborHit {
    NodeId node;
    int distance = 0;
    double path_confidence = 0.0;
};

// Immutable typed snapshot graph. Construction sorts and validates;
// every accessor is const and safe for concurrent readers.
class RepoGraph {
public:
    RepoGraph(std::string snapshot_id, std::vector<NodeId> nodes, std::vector<Edge> edges,
              std::map<NodeId, std::string> attributes,
              std::optional<CommunityAssignment> community = std::nullopt);

    const std::string& snapshot_id() const { return snapshot_id_; }
    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::map<NodeId, std::string>& attributes() const { return attributes_; }
    const std::optional<CommunityAssignment>& community() const { return community_; }

    bool has_node(const NodeId& v) const;
    const NodeId* find_file(const std::string& path) const;
    std::vector<std::string> file_paths() const;

    // Symbols of one file, sorted by (span.start, span.end desc) so outer
    // symbols come before the nested ones they contain.
    std::vector<NodeId> symbols_in_file(const std::string& path) const;

    // K-hop confidence-filtered neighborhood. Semantic edges only, treated
    // as undirected; contains edges never traversed; the filter is
    // inclusive (edge kept when confidence >= theta).
    std::vector<NeighborHit> neighborhood(const NodeId& v, int hops, double theta) const;

    // Innermost class/function whose span contains the line, else the file node.
    NodeId node_for_location(const std::string& path, int line) const;

    RepoGraph induced_subgraph(const std::set<NodeId>& s) const;

    // Structural equality on the parts alignment must preserve.
    bool same_nodes_and_edges(const RepoGraph& other) const;

    // Copy of this graph with a different community assignment.
    RepoGraph with_community(std::optional<CommunityAssignment> community) const;

    // index plumbing shared with extractors/sidecars
    int index_of(const NodeId& v) const;
    const NodeId& node_at(int idx) const { return nodes_[static_cast<size_t>(idx)]; }

    struct AdjEntry {
        int neighbor;
        double confidence;
        RelationKind relation;
        bool outgoing; // true when the underlying edge is (this -> neighbor)
    };
    const std::vector<AdjEntry>& semantic_adjacency(int idx) const;

private:
    void build_indexes();

    std::string snapshot_id_;
    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::string> attributes_;
    std::optional<CommunityAssignment> community_;

    std::map<NodeId, int> node_index_;
    std::map<std::string, int> file_index_;
    std::map<std::string, std::vector<int>> file_symbols_;
    std::vector<std::vector<AdjEntry>> adjacency_;
};

} // namespace repograph
