#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace repograph {

struct CommandOptions {
    std::filesystem::path repo = ".";
    std::filesystem::path config_file; // empty: <metadata dir>/config.toml
    bool json = false;
};

struct IndexOptions {
    bool drop_tests = false;
    bool compact = false;
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    int seed = -1; // <0: keep config value
};

struct SearchOptions {
    std::string pattern;
    bool no_graph = false;
    bool no_align = false;
    bool compact = false;
    int k = -1;
    double theta = -1.0;
    int hops = -1;
    int anchors = -1;
    int budget = -1;
};

struct BenchOptions {
    std::vector<int> sizes{200, 500, 1000, 2000};
    double diff_fraction = 0.01;
    int repetitions = 5;
};

struct SimulateOptions {
    int seeds = 10;
    uint64_t seed_base = 1;
    std::filesystem::path spec_file;
    bool with_traces = true;
};

// Exit codes: 0 success (search: with matches), 1 search without matches or
// missing sidecar, 2 bad input / IO failure, 3 missing index.
int cmd_index(const CommandOptions& opts, const IndexOptions& index_opts, std::ostream& out,
              std::ostream& err);
int cmd_align(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_search(const CommandOptions& opts, const SearchOptions& search_opts, std::ostream& out,
               std::ostream& err);
int cmd_sidecar(const CommandOptions& opts, const std::string& file_path, std::ostream& out,
                std::ostream& err);
int cmd_bench_align(const CommandOptions& opts, const BenchOptions& bench, std::ostream& out,
                    std::ostream& err);
int cmd_simulate(const CommandOptions& opts, const SimulateOptions& sim, std::ostream& out,
                 std::ostream& err);

} // namespace repograph
