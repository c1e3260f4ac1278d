#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "repograph/config.hpp"
#include "repograph/graph.hpp"

namespace repograph {

// Shape of a generated synthetic repository. Densities are expected
// cross-file references per file; visibility is the share of planted
// targets directly matchable by the scripted queries.
struct SyntheticRepoSpec {
    int file_count = 24;
    int min_symbols = 3;
    int max_symbols = 6;
    double import_density = 1.5;
    double invoke_density = 2.0;
    double inherit_density = 0.3;
    double fuzzy_density = 0.6;
    int target_count = 4;
    double visibility = 0.5;
    int packages = 3;
    bool with_tests = true;
    bool with_docs = true;
    bool with_configs = true;
    uint64_t seed = 1;

    static SyntheticRepoSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct PlantedRepo {
    std::vector<std::pair<std::string, std::string>> visible; // (path, qualified_name)
    std::vector<std::pair<std::string, std::string>> hidden;
    std::vector<std::string> queries; // regexes over visible names, in step order
};

// Deterministic source tree satisfying the spec; hidden targets are planted
// one confidence-0.9 invoke hop from a visible target so reachability holds
// by construction. Throws InfeasibleSpec when a hidden plant is requested
// but the invoke mechanism is disabled.
PlantedRepo generate_repo(const SyntheticRepoSpec& spec, const std::filesystem::path& out_dir);

struct StepTrace {
    int step = 0;
    std::vector<std::string> anchors;
    int gamma_size = 0;
    int gamma_cost = 0;
    std::vector<std::string> members;
    int hits = 0;
    double recall = 0.0;
    int rendered_cost = 0;
    bool budget_saturated = false;
};

struct RunTrace {
    std::string regime; // "lex" | "larger"
    int y_size = 0;
    std::vector<StepTrace> steps;
};

nlohmann::json trace_to_json(const RunTrace& t);

struct RegimePair {
    RunTrace lex;
    RunTrace larger;
};

// Runs the scripted active-set loop twice over the identical query stream:
// once with expansion disabled and once with the full system.
RegimePair run_regimes(const std::filesystem::path& worktree, const RepoGraph& g,
                       const std::set<NodeId>& y, const std::vector<std::string>& queries,
                       const ExpansionConfig& cfg);

// First 1-based step whose recall reaches r, or INT_MAX when never reached.
int steps_to_recall(const RunTrace& trace, double r);

struct TokenCostReport {
    bool gamma_within_cap = true;
    int delta_cap = 0;
    int max_gamma_cost = 0;
    int t_lex = 0;
    int t_larger = 0;
    double step_savings_ratio = 0.0;
    double overhead_ratio = 0.0;
    bool strict_dominance_condition = false;
};

// Verifies the per-step augmentation cap and evaluates (not asserts) the
// strict token-cost dominance condition at target recall r.
TokenCostReport token_cost_check(const RegimePair& pair, int per_step_lex_cost, int delta_cap,
                                 double target_recall);

// One full simulation: generate, index, run both regimes, check the
// theory-suite conditions exactly.
struct SimRun {
    uint64_t seed = 0;
    double visibility = 1.0;
    int y_size = 0;
    int visible_count = 0;
    int hidden_count = 0;
    RunTrace lex;
    RunTrace larger;
    int h_t = 0; // |(C_T^larger \ C_T^lex) ∩ Y|
    bool subset_ok = true;
    bool monotone_ok = true;
    bool gap_ok = true;
    bool bound_ok = true;
    bool step_dominance_ok = true;
    bool budget_saturated = false;
};

SimRun run_simulation(const SyntheticRepoSpec& spec, const std::filesystem::path& scratch_dir,
                      const ExpansionConfig& cfg);

nlohmann::json sim_run_to_json(const SimRun& run, bool with_traces);

struct BenchRow {
    int size = 0;
    int delta = 0;
    double rebuild_ms = 0.0;
    double align_ms = 0.0;
    double speedup = 0.0;
};

// Wall-time comparison of full build vs alignment for a diff touching
// diff_fraction of files, median over `repetitions` runs, single-threaded.
std::vector<BenchRow> bench_align(const std::vector<int>& sizes, double diff_fraction,
                                  int repetitions, const std::filesystem::path& work_dir,
                                  const IndexConfig& cfg);

} // namespace repograph
