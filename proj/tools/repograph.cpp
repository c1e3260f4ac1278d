#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "repograph/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"repograph: repository graph indexer and graph-augmented code search"};
    app.require_subcommand(1);

    repograph::CommandOptions opts;
    app.add_option("--repo", opts.repo, "repository root")->capture_default_str();
    app.add_option("--config", opts.config_file, "config file path");
    app.add_flag("--json", opts.json, "machine-readable output");

    auto* index = app.add_subcommand("index", "build the graph index, communities and sidecars");
    repograph::IndexOptions index_opts;
    index->add_flag("--drop-tests", index_opts.drop_tests, "exclude test files from the index");
    index->add_flag("--compact", index_opts.compact, "compact sidecars (10-neighbor cap)");
    index->add_option("--include", index_opts.include, "include globs");
    index->add_option("--exclude", index_opts.exclude, "exclude globs");
    index->add_option("--seed", index_opts.seed, "community detection seed");

    auto* align = app.add_subcommand("align", "align the cached index to the current worktree");

    auto* search = app.add_subcommand("search", "regex search with graph evidence");
    repograph::SearchOptions search_opts;
    search->add_option("pattern", search_opts.pattern, "regex pattern")->required();
    search->add_flag("--no-graph", search_opts.no_graph, "lexical matches only");
    search->add_flag("--no-align", search_opts.no_align, "skip the auto-align check");
    search->add_flag("--compact", search_opts.compact, "compact neighbor lists");
    search->add_option("--k", search_opts.k, "per-anchor neighbor budget");
    search->add_option("--theta", search_opts.theta, "edge confidence threshold");
    search->add_option("--hops", search_opts.hops, "neighborhood hop radius");
    search->add_option("--anchors", search_opts.anchors, "anchor cap");
    search->add_option("--budget", search_opts.budget, "context budget units");

    auto* sidecar = app.add_subcommand("sidecar", "print one file's sidecar record");
    std::string sidecar_path;
    sidecar->add_option("path", sidecar_path, "repository-relative file path")->required();

    auto* bench = app.add_subcommand("bench-align", "benchmark alignment vs full rebuild");
    repograph::BenchOptions bench_opts;
    bench->add_option("--sizes", bench_opts.sizes, "synthetic repo sizes")->delimiter(',');
    bench->add_option("--diff", bench_opts.diff_fraction, "fraction of files to touch");
    bench->add_option("--reps", bench_opts.repetitions, "repetitions per measurement");

    auto* simulate = app.add_subcommand("simulate", "seeded theory-suite simulation runs");
    repograph::SimulateOptions sim_opts;
    simulate->add_option("--seeds", sim_opts.seeds, "number of seeded runs");
    simulate->add_option("--seed-base", sim_opts.seed_base, "first seed value");
    simulate->add_option("--spec", sim_opts.spec_file, "synthetic repo spec (JSON)");

    CLI11_PARSE(app, argc, argv);

    if (index->parsed()) return repograph::cmd_index(opts, index_opts, std::cout, std::cerr);
    if (align->parsed()) return repograph::cmd_align(opts, std::cout, std::cerr);
    if (search->parsed()) return repograph::cmd_search(opts, search_opts, std::cout, std::cerr);
    if (sidecar->parsed()) return repograph::cmd_sidecar(opts, sidecar_path, std::cout, std::cerr);
    if (bench->parsed()) return repograph::cmd_bench_align(opts, bench_opts, std::cout, std::cerr);
    if (simulate->parsed()) return repograph::cmd_simulate(opts, sim_opts, std::cout, std::cerr);
    return 2;
}
