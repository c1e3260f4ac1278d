#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "repograph/graph.hpp"

namespace repograph {

// One typed-neighbor entry in a sidecar. Mirrors an actual graph edge.
struct NeighborRef {
    std::string path;
    std::string symbol;
    RelationKind relation = RelationKind::invokes;
    double confidence = 0.0;

    bool operator==(const NeighborRef&) const = default;
};

struct FlowStep {
    std::string name;
    int step = 0;
    int of = 0;

    bool operator==(const FlowStep&) const = default;
};

// Per-file JSON materialization of a node's typed neighborhood, community
// membership, execution flows, and cross-role links.
struct SidecarRecord {
    std::string path;
    std::string snapshot_id;
    int community_id = 0;
    std::string community_label;
    double community_cohesion = 1.0;
    std::vector<NeighborRef> dependents;
    std::vector<NeighborRef> dependencies;
    std::vector<NeighborRef> callers;
    std::vector<NeighborRef> callees;
    std::vector<FlowStep> flows;
    std::vector<std::string> tests;
    std::vector<std::string> docs;
    std::vector<std::string> configs;

    bool operator==(const SidecarRecord&) const = default;
};

using FlowMap = std::map<std::string, std::vector<FlowStep>>;

// Greedy highest-confidence call chains from entry-point functions
// (no incoming invokes edge), at most max_len hops, cycles broken, members
// deduplicated at file level.
FlowMap derive_flows(const RepoGraph& g, int max_len);

SidecarRecord sidecar_for_file(const RepoGraph& g, const std::string& path, int cap,
                               const FlowMap& flows);

nlohmann::json sidecar_to_json(const SidecarRecord& rec);
SidecarRecord sidecar_from_json(const nlohmann::json& j);

std::filesystem::path sidecar_path(const std::filesystem::path& out_dir,
                                   const std::string& file_path);

// Writes one record per file node under out_dir, mirroring the repo tree
// as <out_dir>/<path>.graph.json. Returns the number written.
int build_sidecars(const RepoGraph& g, int cap, const std::filesystem::path& out_dir,
                   int flow_max_len = 8);
int build_sidecars_for(const RepoGraph& g, int cap, const std::filesystem::path& out_dir,
                       const std::vector<std::string>& paths, int flow_max_len = 8);

// Loads and validates one record; expected_snapshot comes from the
// manifest's per-file sidecar epoch.
SidecarRecord load_sidecar(const std::filesystem::path& out_dir, const std::string& file_path,
                           const std::string& expected_snapshot);

} // namespace repograph
