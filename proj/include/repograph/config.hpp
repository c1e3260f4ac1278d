#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace repograph {

// Per-anchor expansion knobs. Defaults k=10 / theta=0.5 are the fixed
// operating point; decay and community_bonus shape the score product.
struct ExpansionConfig {
    int k = 10;
    double theta = 0.5;
    int hops = 1;
    int anchor_cap = 10;
    double decay = 0.7;
    double community_bonus = 0.25;
    int budget_units = 100000;
    int node_render_cap = 200; // character cap per rendered node line
};

struct IndexConfig {
    std::vector<std::string> include_globs;
    std::vector<std::string> exclude_globs;
    bool drop_tests = false;
    std::vector<std::string> adapters{"python", "regex"};
    int sidecar_cap = 20;
    int flow_max_len = 8;
    int community_seed = 42;
    double leiden_resolution = 1.0;
    double stale_threshold = 0.10;
    ExpansionConfig expansion;
};

// Simple `key = value` config file; lists are comma separated, `#` starts
// a comment. Missing file yields defaults.
IndexConfig load_config(const std::filesystem::path& file);
IndexConfig parse_config_text(const std::string& text);

// Glob match against a repo-relative path: `*`/`?` stop at '/', `**` spans.
bool glob_match(const std::string& pattern, const std::string& path);

// Resolves the metadata directory: REPOGRAPH_DIR env override (absolute, or
// relative to the repo root) falling back to <repo>/.repograph.
std::filesystem::path repograph_dir(const std::filesystem::path& repo_root);

} // namespace repograph
