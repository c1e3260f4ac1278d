#include "repograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace repograph {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::directory: return "directory";
        case NodeKind::file: return "file";
        case NodeKind::class_: return "class";
        case NodeKind::function: return "function";
    }
    return "?";
}

const char* to_string(RelationKind r) {
    switch (r) {
        case RelationKind::contains: return "contains";
        case RelationKind::imports: return "imports";
        case RelationKind::invokes: return "invokes";
        case RelationKind::inherits: return "inherits";
        case RelationKind::tested_by: return "tested_by";
        case RelationKind::documents: return "documents";
        case RelationKind::configures: return "configures";
    }
    return "?";
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::same_file_cooccurrence: return "same_file_cooccurrence";
        case Provenance::explicit_import: return "explicit_import";
        case Provenance::resolved_import: return "resolved_import";
        case Provenance::inheritance: return "inheritance";
        case Provenance::cython_implementation: return "cython_implementation";
        case Provenance::test_linkage: return "test_linkage";
        case Provenance::documentation: return "documentation";
        case Provenance::configuration: return "configuration";
        case Provenance::fuzzy_name_match: return "fuzzy_name_match";
        case Provenance::structural: return "structural";
    }
    return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
    if (s == "directory") return NodeKind::directory;
    if (s == "file") return NodeKind::file;
    if (s == "class") return NodeKind::class_;
    if (s == "function") return NodeKind::function;
    raise(Errc::invalid_argument, "unknown node kind '" + s + "'");
}

RelationKind relation_from_string(const std::string& s) {
    if (s == "contains") return RelationKind::contains;
    if (s == "imports") return RelationKind::imports;
    if (s == "invokes") return RelationKind::invokes;
    if (s == "inherits") return RelationKind::inherits;
    if (s == "tested_by") return RelationKind::tested_by;
    if (s == "documents") return RelationKind::documents;
    if (s == "configures") return RelationKind::configures;
    raise(Errc::invalid_argument, "unknown relation '" + s + "'");
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "same_file_cooccurrence") return Provenance::same_file_cooccurrence;
    if (s == "explicit_import") return Provenance::explicit_import;
    if (s == "resolved_import") return Provenance::resolved_import;
    if (s == "inheritance") return Provenance::inheritance;
    if (s == "cython_implementation") return Provenance::cython_implementation;
    if (s == "test_linkage") return Provenance::test_linkage;
    if (s == "documentation") return Provenance::documentation;
    if (s == "configuration") return Provenance::configuration;
    if (s == "fuzzy_name_match") return Provenance::fuzzy_name_match;
    if (s == "structural") return Provenance::structural;
    raise(Errc::invalid_argument, "unknown provenance '" + s + "'");
}

double confidence_of(Provenance p) {
    switch (p) {
        case Provenance::same_file_cooccurrence: return 1.0;
        case Provenance::explicit_import: return 0.95;
        case Provenance::resolved_import: return 0.9;
        case Provenance::inheritance: return 0.9;
        case Provenance::cython_implementation: return 0.85;
        case Provenance::test_linkage: return 0.75;
        case Provenance::documentation: return 0.6;
        case Provenance::configuration: return 0.5;
        case Provenance::fuzzy_name_match: return 0.5;
        case Provenance::structural: return 1.0;
    }
    return 0.0;
}

std::string format_confidence(double c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", c);
    std::string s(buf);
    if (s.size() > 1 && s.back() == '0') s.pop_back();
    return s;
}

static char kind_tag(NodeKind k) {
    switch (k) {
        case NodeKind::directory: return 'd';
        case NodeKind::file: return 'f';
        case NodeKind::class_: return 'c';
        case NodeKind::function: return 'u';
    }
    return '?';
}

std::string NodeId::key() const {
    switch (kind) {
        case NodeKind::directory: return "dir:" + path;
        case NodeKind::file: return "file:" + path;
        case NodeKind::class_:
        case NodeKind::function: {
            std::string prefix = kind == NodeKind::class_ ? "class:" : "func:";
            return prefix + path + "#" + qualified_name + "@" + std::to_string(span.start) + "-" +
                   std::to_string(span.end);
        }
    }
    return "?";
}

NodeId NodeId::from_key(const std::string& key) {
    auto colon = key.find(':');
    if (colon == std::string::npos) raise(Errc::invalid_argument, "bad node key '" + key + "'");
    std::string tag = key.substr(0, colon);
    std::string rest = key.substr(colon + 1);
    if (tag == "dir") return directory(rest);
    if (tag == "file") return file(rest);
    if (tag != "class" && tag != "func")
        raise(Errc::invalid_argument, "bad node key '" + key + "'");
    auto hash = rest.rfind('#');
    auto at = rest.rfind('@');
    auto dash = rest.rfind('-');
    if (hash == std::string::npos || at == std::string::npos || dash == std::string::npos ||
        !(hash < at && at < dash))
        raise(Errc::invalid_argument, "bad node key '" + key + "'");
    NodeId id;
    id.kind = tag == "class" ? NodeKind::class_ : NodeKind::function;
    id.path = rest.substr(0, hash);
    id.qualified_name = rest.substr(hash + 1, at - hash - 1);
    id.span.start = std::stoi(rest.substr(at + 1, dash - at - 1));
    id.span.end = std::stoi(rest.substr(dash + 1));
    return id;
}

NodeId NodeId::directory(std::string path) {
    return NodeId{std::move(path), NodeKind::directory, "", {0, 0}};
}

NodeId NodeId::file(std::string path) {
    return NodeId{std::move(path), NodeKind::file, "", {0, 0}};
}

NodeId NodeId::symbol(NodeKind kind, std::string path, std::string qualified_name, Span span) {
    return NodeId{std::move(path), kind, std::move(qualified_name), span};
}

Edge make_edge(NodeId src, RelationKind relation, NodeId dst, Provenance provenance) {
    return Edge{std::move(src), relation, std::move(dst), provenance, confidence_of(provenance)};
}

RepoGraph::RepoGraph(std::string snapshot_id, std::vector<NodeId> nodes, std::vector<Edge> edges,
                     std::map<NodeId, std::string> attributes,
                     std::optional<CommunityAssignment> community)
    : snapshot_id_(std::move(snapshot_id)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      attributes_(std::move(attributes)),
      community_(std::move(community)) {
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
        raise(Errc::invalid_argument, "duplicate node in graph");
    std::sort(edges_.begin(), edges_.end());
    build_indexes();
}

void RepoGraph::build_indexes() {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const NodeId& n = nodes_[i];
        node_index_[n] = static_cast<int>(i);
        if (n.kind == NodeKind::file) file_index_[n.path] = static_cast<int>(i);
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const NodeId& n = nodes_[i];
        if (n.is_symbol()) file_symbols_[n.path].push_back(static_cast<int>(i));
    }
    adjacency_.assign(nodes_.size(), {});
    for (const Edge& e : edges_) {
        if (e.src == e.dst) raise(Errc::invalid_argument, "self edge " + e.src.key());
        auto si = node_index_.find(e.src);
        auto di = node_index_.find(e.dst);
        if (si == node_index_.end() || di == node_index_.end())
            raise(Errc::invalid_argument, "edge endpoint missing from node set");
        bool structural = e.provenance == Provenance::structural;
        bool contains = e.relation == RelationKind::contains;
        if (contains != structural || (contains && e.confidence != 1.0))
            raise(Errc::invalid_argument, "contains/structural/1.0 must coincide");
        if (e.confidence != confidence_of(e.provenance))
            raise(Errc::invalid_argument, "edge confidence off the provenance table");
        if (!e.is_semantic()) continue;
        adjacency_[static_cast<size_t>(si->second)].push_back(
            {di->second, e.confidence, e.relation, true});
        adjacency_[static_cast<size_t>(di->second)].push_back(
            {si->second, e.confidence, e.relation, false});
    }
}

bool RepoGraph::has_node(const NodeId& v) const {
    return node_index_.count(v) > 0;
}

int RepoGraph::index_of(const NodeId& v) const {
    auto it = node_index_.find(v);
    if (it == node_index_.end()) raise(Errc::node_not_found, v.key());
    return it->second;
}

const std::vector<RepoGraph::AdjEntry>& RepoGraph::semantic_adjacency(int idx) const {
    return adjacency_[static_cast<size_t>(idx)];
}

const NodeId* RepoGraph::find_file(const std::string& path) const {
    auto it = file_index_.find(path);
    if (it == file_index_.end()) return nullptr;
    return &nodes_[static_cast<size_t>(it->second)];
}

std::vector<std::string> RepoGraph::file_paths() const {
    std::vector<std::string> out;
    out.reserve(file_index_.size());
    for (const auto& [path, _] : file_index_) out.push_back(path);
    return out;
}

std::vector<NodeId> RepoGraph::symbols_in_file(const std::string& path) const {
    std::vector<NodeId> out;
    auto it = file_symbols_.find(path);
    if (it == file_symbols_.end()) return out;
    for (int idx : it->second) out.push_back(nodes_[static_cast<size_t>(idx)]);
    std::sort(out.begin(), out.end(), [](const NodeId& a, const NodeId& b) {
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        if (a.span.end != b.span.end) return a.span.end > b.span.end;
        return a < b;
    });
    return out;
}

std::vector<NeighborHit> RepoGraph::neighborhood(const NodeId& v, int hops, double theta) const {
    if (hops <= 0) raise(Errc::invalid_argument, "hops must be >= 1");
    int start = index_of(v);

    // Level-synchronized BFS: a node's path confidence is the best
    // min-confidence over all shortest paths, so each frontier node takes
    // the max over every predecessor in the previous level.
    std::vector<int> dist(nodes_.size(), -1);
    std::vector<double> conf(nodes_.size(), 0.0);
    dist[static_cast<size_t>(start)] = 0;
    conf[static_cast<size_t>(start)] = 1.0;
    std::vector<int> level{start};
    std::vector<NeighborHit> out;

    for (int d = 1; d <= hops && !level.empty(); ++d) {
        std::vector<int> next;
        for (int u : level) {
            for (const AdjEntry& a : adjacency_[static_cast<size_t>(u)]) {
                if (a.confidence < theta) continue;
                int w = a.neighbor;
                if (dist[static_cast<size_t>(w)] != -1 && dist[static_cast<size_t>(w)] < d)
                    continue;
                double through = std::min(conf[static_cast<size_t>(u)], a.confidence);
                if (dist[static_cast<size_t>(w)] == -1) {
                    dist[static_cast<size_t>(w)] = d;
                    conf[static_cast<size_t>(w)] = through;
                    next.push_back(w);
                } else if (through > conf[static_cast<size_t>(w)]) {
                    conf[static_cast<size_t>(w)] = through;
                }
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (int w : next)
            out.push_back({nodes_[static_cast<size_t>(w)], d, conf[static_cast<size_t>(w)]});
        level = std::move(next);
    }
    return out;
}

NodeId RepoGraph::node_for_location(const std::string& path, int line) const {
    auto fit = file_index_.find(path);
    if (fit == file_index_.end()) raise(Errc::node_not_found, "no file node for '" + path + "'");
    const NodeId* best = nullptr;
    auto sit = file_symbols_.find(path);
    if (sit != file_symbols_.end()) {
        for (int idx : sit->second) {
            const NodeId& n = nodes_[static_cast<size_t>(idx)];
            if (line < n.span.start || line > n.span.end) continue;
            if (!best) {
                best = &n;
                continue;
            }
            int cur = n.span.end - n.span.start;
            int old = best->span.end - best->span.start;
            if (cur < old || (cur == old && n.span.start > best->span.start)) best = &n;
        }
    }
    if (best) return *best;
    return nodes_[static_cast<size_t>(fit->second)];
}

RepoGraph RepoGraph::induced_subgraph(const std::set<NodeId>& s) const {
    for (const NodeId& v : s)
        if (!has_node(v)) raise(Errc::node_not_found, v.key());
    std::vector<NodeId> nodes(s.begin(), s.end());
    std::vector<Edge> edges;
    for (const Edge& e : edges_)
        if (s.count(e.src) && s.count(e.dst)) edges.push_back(e);
    std::map<NodeId, std::string> attrs;
    for (const NodeId& v : s) {
        auto it = attributes_.find(v);
        if (it != attributes_.end()) attrs[v] = it->second;
    }
    return RepoGraph(snapshot_id_, std::move(nodes), std::move(edges), std::move(attrs));
}

bool RepoGraph::same_nodes_and_edges(const RepoGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
}

RepoGraph RepoGraph::with_community(std::optional<CommunityAssignment> community) const {
    return RepoGraph(snapshot_id_, nodes_, edges_, attributes_, std::move(community));
}

} // namespace repograph
