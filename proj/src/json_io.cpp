#include "repograph/json_io.hpp"

#include <fstream>
#include <sstream>

namespace repograph {

using nlohmann::json;

nlohmann::json community_to_json(const CommunityAssignment& c) {
    json j;
    j["kappa"] = json::object();
    for (const auto& [path, id] : c.kappa) j["kappa"][path] = id;
    j["labels"] = json::object();
    for (const auto& [id, label] : c.labels) j["labels"][std::to_string(id)] = label;
    j["cohesion"] = json::object();
    for (const auto& [path, d] : c.cohesion) j["cohesion"][path] = d;
    j["stale"] = c.stale;
    return j;
}

CommunityAssignment community_from_json(const nlohmann::json& j) {
    CommunityAssignment c;
    for (const auto& [path, id] : j.at("kappa").items()) c.kappa[path] = id.get<int>();
    for (const auto& [id, label] : j.at("labels").items())
        c.labels[std::stoi(id)] = label.get<std::string>();
    for (const auto& [path, d] : j.at("cohesion").items()) c.cohesion[path] = d.get<double>();
    c.stale = j.at("stale").get<bool>();
    return c;
}

nlohmann::json graph_to_json(const RepoGraph& g) {
    json j;
    j["snapshot_id"] = g.snapshot_id();
    json nodes = json::array();
    for (const NodeId& n : g.nodes()) {
        nodes.push_back({{"kind", to_string(n.kind)},
                         {"path", n.path},
                         {"qualified_name", n.qualified_name},
                         {"span", {n.span.start, n.span.end}}});
    }
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const Edge& e : g.edges()) {
        edges.push_back({{"src", e.src.key()},
                         {"relation", to_string(e.relation)},
                         {"dst", e.dst.key()},
                         {"provenance", to_string(e.provenance)},
                         {"confidence", e.confidence}});
    }
    j["edges"] = std::move(edges);
    json attrs = json::object();
    for (const auto& [node, text] : g.attributes()) attrs[node.key()] = text;
    j["attributes"] = std::move(attrs);
    if (g.community()) j["community"] = community_to_json(*g.community());
    return j;
}

RepoGraph graph_from_json(const nlohmann::json& j) {
    std::vector<NodeId> nodes;
    for (const auto& n : j.at("nodes")) {
        NodeId id;
        id.kind = node_kind_from_string(n.at("kind").get<std::string>());
        id.path = n.at("path").get<std::string>();
        id.qualified_name = n.at("qualified_name").get<std::string>();
        id.span.start = n.at("span").at(0).get<int>();
        id.span.end = n.at("span").at(1).get<int>();
        nodes.push_back(std::move(id));
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        Edge edge;
        edge.src = NodeId::from_key(e.at("src").get<std::string>());
        edge.relation = relation_from_string(e.at("relation").get<std::string>());
        edge.dst = NodeId::from_key(e.at("dst").get<std::string>());
        edge.provenance = provenance_from_string(e.at("provenance").get<std::string>());
        edge.confidence = e.at("confidence").get<double>();
        edges.push_back(std::move(edge));
    }
    std::map<NodeId, std::string> attrs;
    for (const auto& [key, text] : j.at("attributes").items())
        attrs[NodeId::from_key(key)] = text.get<std::string>();
    std::optional<CommunityAssignment> community;
    if (j.contains("community")) community = community_from_json(j.at("community"));
    return RepoGraph(j.at("snapshot_id").get<std::string>(), std::move(nodes), std::move(edges),
                     std::move(attrs), std::move(community));
}

std::string canonical_dump(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + path.string());
    out << content;
    if (!out) raise(Errc::io_error, "short write to " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_graph(const RepoGraph& g, const std::filesystem::path& path) {
    write_text_file(path, canonical_dump(graph_to_json(g)));
}

RepoGraph load_graph(const std::filesystem::path& path) {
    return graph_from_json(json::parse(read_text_file(path)));
}

} // namespace repograph
