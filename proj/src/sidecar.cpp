#include "repograph/sidecar.hpp"

#include <algorithm>

#include "repograph/json_io.hpp"

namespace repograph {

using nlohmann::json;

FlowMap derive_flows(const RepoGraph& g, int max_len) {
    // entry points: function nodes nobody invokes
    std::vector<const NodeId*> entries;
    for (const NodeId& n : g.nodes()) {
        if (n.kind != NodeKind::function) continue;
        bool has_incoming_invoke = false;
        for (const auto& adj : g.semantic_adjacency(g.index_of(n))) {
            if (!adj.outgoing && adj.relation == RelationKind::invokes) {
                has_incoming_invoke = true;
                break;
            }
        }
        if (!has_incoming_invoke) entries.push_back(&n);
    }
    std::sort(entries.begin(), entries.end(),
              [](const NodeId* a, const NodeId* b) { return *a < *b; });

    FlowMap flows;
    for (const NodeId* entry : entries) {
        std::set<int> visited;
        std::vector<std::string> chain_files;
        int current = g.index_of(*entry);
        visited.insert(current);
        chain_files.push_back(entry->path);
        for (int hop = 0; hop < max_len; ++hop) {
            const NodeId* best = nullptr;
            double best_conf = -1.0;
            int best_idx = -1;
            for (const auto& adj : g.semantic_adjacency(current)) {
                if (!adj.outgoing || adj.relation != RelationKind::invokes) continue;
                if (visited.count(adj.neighbor)) continue;
                const NodeId& cand = g.node_at(adj.neighbor);
                if (!cand.is_symbol()) continue;
                if (adj.confidence > best_conf ||
                    (adj.confidence == best_conf && best && cand < *best)) {
                    best = &cand;
                    best_conf = adj.confidence;
                    best_idx = adj.neighbor;
                }
            }
            if (!best) break;
            current = best_idx;
            visited.insert(best_idx);
            if (std::find(chain_files.begin(), chain_files.end(), best->path) ==
                chain_files.end())
                chain_files.push_back(best->path);
        }
        int of = static_cast<int>(chain_files.size());
        for (int i = 0; i < of; ++i)
            flows[chain_files[static_cast<size_t>(i)]].push_back(
                {entry->qualified_name, i + 1, of});
    }
    for (auto& [_, steps] : flows)
        std::sort(steps.begin(), steps.end(), [](const FlowStep& a, const FlowStep& b) {
            if (a.name != b.name) return a.name < b.name;
            if (a.step != b.step) return a.step < b.step;
            return a.of < b.of;
        });
    return flows;
}

namespace {

void sort_and_cap(std::vector<NeighborRef>& refs, int cap) {
    std::sort(refs.begin(), refs.end(), [](const NeighborRef& a, const NeighborRef& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.path != b.path) return a.path < b.path;
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.relation < b.relation;
    });
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    if (static_cast<int>(refs.size()) > cap) refs.resize(static_cast<size_t>(cap));
}

} // namespace

SidecarRecord sidecar_for_file(const RepoGraph& g, const std::string& path, int cap,
                               const FlowMap& flows) {
    if (!g.community()) raise(Errc::missing_communities, "graph has no community assignment");
    const CommunityAssignment& comm = *g.community();
    if (!g.find_file(path)) raise(Errc::node_not_found, "no file node for '" + path + "'");

    SidecarRecord rec;
    rec.path = path;
    rec.snapshot_id = g.snapshot_id();
    auto kit = comm.kappa.find(path);
    rec.community_id = kit == comm.kappa.end() ? 0 : kit->second;
    auto lit = comm.labels.find(rec.community_id);
    rec.community_label = lit == comm.labels.end() ? "Files" : lit->second;
    auto cit = comm.cohesion.find(path);
    rec.community_cohesion = cit == comm.cohesion.end() ? 1.0 : cit->second;

    for (const Edge& e : g.edges()) {
        if (!e.is_semantic() || e.src.path == e.dst.path) continue;
        if (e.is_cross_artifact()) {
            if (e.src.path != path) continue;
            if (e.relation == RelationKind::tested_by) rec.tests.push_back(e.dst.path);
            if (e.relation == RelationKind::documents) rec.docs.push_back(e.dst.path);
            if (e.relation == RelationKind::configures) rec.configs.push_back(e.dst.path);
            continue;
        }
        if (e.src.path == path) {
            rec.dependencies.push_back(
                {e.dst.path, e.dst.qualified_name, e.relation, e.confidence});
            if (e.relation == RelationKind::invokes)
                rec.callees.push_back({e.dst.path, e.dst.qualified_name, e.relation,
                                       e.confidence});
        } else if (e.dst.path == path) {
            rec.dependents.push_back(
                {e.src.path, e.src.qualified_name, e.relation, e.confidence});
            if (e.relation == RelationKind::invokes)
                rec.callers.push_back({e.src.path, e.src.qualified_name, e.relation,
                                       e.confidence});
        }
    }
    sort_and_cap(rec.dependents, cap);
    sort_and_cap(rec.dependencies, cap);
    sort_and_cap(rec.callers, cap);
    sort_and_cap(rec.callees, cap);
    for (auto* list : {&rec.tests, &rec.docs, &rec.configs}) {
        std::sort(list->begin(), list->end());
        list->erase(std::unique(list->begin(), list->end()), list->end());
    }
    auto fit = flows.find(path);
    if (fit != flows.end()) rec.flows = fit->second;
    return rec;
}

namespace {

json neighbor_to_json(const NeighborRef& n) {
    return {{"path", n.path},
            {"symbol", n.symbol},
            {"relation", to_string(n.relation)},
            {"confidence", n.confidence}};
}

NeighborRef neighbor_from_json(const json& j) {
    return {j.at("path").get<std::string>(), j.at("symbol").get<std::string>(),
            relation_from_string(j.at("relation").get<std::string>()),
            j.at("confidence").get<double>()};
}

} // namespace

nlohmann::json sidecar_to_json(const SidecarRecord& rec) {
    json j;
    j["path"] = rec.path;
    j["snapshot_id"] = rec.snapshot_id;
    j["community"] = {{"id", rec.community_id},
                      {"label", rec.community_label},
                      {"cohesion", rec.community_cohesion}};
    for (const auto& [key, list] : std::initializer_list<
             std::pair<const char*, const std::vector<NeighborRef>*>>{
             {"dependents", &rec.dependents},
             {"dependencies", &rec.dependencies},
             {"callers", &rec.callers},
             {"callees", &rec.callees}}) {
        json arr = json::array();
        for (const NeighborRef& n : *list) arr.push_back(neighbor_to_json(n));
        j[key] = std::move(arr);
    }
    json flows = json::array();
    for (const FlowStep& f : rec.flows)
        flows.push_back({{"name", f.name}, {"step", f.step}, {"of", f.of}});
    j["flows"] = std::move(flows);
    j["tests"] = rec.tests;
    j["docs"] = rec.docs;
    j["configs"] = rec.configs;
    return j;
}

SidecarRecord sidecar_from_json(const nlohmann::json& j) {
    SidecarRecord rec;
    rec.path = j.at("path").get<std::string>();
    rec.snapshot_id = j.at("snapshot_id").get<std::string>();
    rec.community_id = j.at("community").at("id").get<int>();
    rec.community_label = j.at("community").at("label").get<std::string>();
    rec.community_cohesion = j.at("community").at("cohesion").get<double>();
    for (const auto& n : j.at("dependents")) rec.dependents.push_back(neighbor_from_json(n));
    for (const auto& n : j.at("dependencies")) rec.dependencies.push_back(neighbor_from_json(n));
    for (const auto& n : j.at("callers")) rec.callers.push_back(neighbor_from_json(n));
    for (const auto& n : j.at("callees")) rec.callees.push_back(neighbor_from_json(n));
    for (const auto& f : j.at("flows"))
        rec.flows.push_back(
            {f.at("name").get<std::string>(), f.at("step").get<int>(), f.at("of").get<int>()});
    rec.tests = j.at("tests").get<std::vector<std::string>>();
    rec.docs = j.at("docs").get<std::vector<std::string>>();
    rec.configs = j.at("configs").get<std::vector<std::string>>();
    return rec;
}

std::filesystem::path sidecar_path(const std::filesystem::path& out_dir,
                                   const std::string& file_path) {
    return out_dir / (file_path + ".graph.json");
}

int build_sidecars(const RepoGraph& g, int cap, const std::filesystem::path& out_dir,
                   int flow_max_len) {
    return build_sidecars_for(g, cap, out_dir, g.file_paths(), flow_max_len);
}

int build_sidecars_for(const RepoGraph& g, int cap, const std::filesystem::path& out_dir,
                       const std::vector<std::string>& paths, int flow_max_len) {
    if (!g.community()) raise(Errc::missing_communities, "build sidecars before communities");
    FlowMap flows = derive_flows(g, flow_max_len);
    int written = 0;
    for (const std::string& path : paths) {
        SidecarRecord rec = sidecar_for_file(g, path, cap, flows);
        write_text_file(sidecar_path(out_dir, path), canonical_dump(sidecar_to_json(rec)));
        ++written;
    }
    return written;
}

SidecarRecord load_sidecar(const std::filesystem::path& out_dir, const std::string& file_path,
                           const std::string& expected_snapshot) {
    auto p = sidecar_path(out_dir, file_path);
    if (!std::filesystem::exists(p))
        raise(Errc::sidecar_not_found, "no sidecar for '" + file_path + "'");
    SidecarRecord rec = sidecar_from_json(json::parse(read_text_file(p)));
    if (rec.snapshot_id != expected_snapshot)
        raise(Errc::stale_sidecar, "sidecar for '" + file_path + "' is at snapshot " +
                                       rec.snapshot_id + " but expected " + expected_snapshot);
    return rec;
}

} // namespace repograph
