#include "repograph/commands.hpp"

#include <chrono>
#include <ostream>
#include <sstream>

#include "repograph/align.hpp"
#include "repograph/communities.hpp"
#include "repograph/config.hpp"
#include "repograph/expansion.hpp"
#include "repograph/extract.hpp"
#include "repograph/json_io.hpp"
#include "repograph/search.hpp"
#include "repograph/sidecar.hpp"
#include "repograph/simulate.hpp"

namespace repograph {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

IndexConfig effective_config(const CommandOptions& opts) {
    fs::path cfg_file = opts.config_file.empty() ? repograph_dir(opts.repo) / "config.toml"
                                                 : opts.config_file;
    return load_config(cfg_file);
}

json report_to_json(const ExtractionReport& report) {
    json by_prov = json::object();
    for (const auto& [prov, count] : report.edges_by_provenance)
        by_prov[to_string(prov)] = count;
    return {{"files_parsed", report.files_parsed},
            {"files_skipped", report.files_skipped},
            {"edges_by_provenance", std::move(by_prov)},
            {"unresolved_references", report.unresolved_references}};
}

void print_report(const ExtractionReport& report, std::ostream& out) {
    out << "parsed " << report.files_parsed << " files (" << report.files_skipped
        << " skipped), " << report.unresolved_references << " unresolved references\n";
    for (const auto& [prov, count] : report.edges_by_provenance)
        out << "  " << to_string(prov) << ": " << count << "\n";
}

struct AlignOutcome {
    RepoGraph graph;
    DiffSet diff;
    double elapsed_ms = 0.0;
    int sidecars_refreshed = 0;
};

// Shared by cmd_align and cmd_search auto-align: runs the alignment
// operator, persists graph/manifest, and refreshes the affected sidecars
// (all of them when the staleness threshold triggers a community recompute).
AlignOutcome align_and_save(const fs::path& repo, const fs::path& meta, const IndexConfig& cfg,
                            const RepoGraph& g_prev, const Manifest& manifest,
                            const DiffSet& diff,
                            const std::map<std::string, std::string>& new_hashes) {
    (void)new_hashes;
    auto t0 = std::chrono::steady_clock::now();
    AlignOutput out = align(g_prev, manifest, diff, repo, cfg);

    RepoGraph graph = std::move(out.graph);
    double fraction = out.cumulative_diff_fraction;
    std::vector<std::string> refresh = out.sidecar_dirty;
    if (fraction > cfg.stale_threshold) {
        graph = recompute_if_stale(graph, fraction, cfg.stale_threshold, cfg);
        fraction = 0.0;
        refresh = graph.file_paths(); // community ids may have moved everywhere
    }

    save_graph(graph, meta / "graph.json");
    std::map<std::string, std::string> epochs = manifest.sidecar_epoch;
    for (const std::string& p : diff.deleted) {
        epochs.erase(p);
        std::error_code ec;
        fs::remove(sidecar_path(meta / "sidecars", p), ec);
    }
    for (const std::string& p : refresh) epochs[p] = graph.snapshot_id();
    Manifest next = make_manifest(graph, out.records, out.file_hashes, fraction, epochs);
    save_manifest(next, meta / "manifest.json");
    int refreshed =
        build_sidecars_for(graph, cfg.sidecar_cap, meta / "sidecars", refresh, cfg.flow_max_len);
    double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return AlignOutcome{std::move(graph), diff, elapsed, refreshed};
}

} // namespace

int cmd_index(const CommandOptions& opts, const IndexOptions& index_opts, std::ostream& out,
              std::ostream& err) {
    try {
        IndexConfig cfg = effective_config(opts);
        if (index_opts.drop_tests) cfg.drop_tests = true;
        if (index_opts.compact) cfg.sidecar_cap = 10;
        if (!index_opts.include.empty()) cfg.include_globs = index_opts.include;
        if (!index_opts.exclude.empty()) cfg.exclude_globs = index_opts.exclude;
        if (index_opts.seed >= 0) cfg.community_seed = index_opts.seed;

        fs::path meta = repograph_dir(opts.repo);
        fs::path manifest_path = meta / "manifest.json";
        if (fs::exists(manifest_path) && fs::exists(meta / "graph.json")) {
            Manifest m = load_manifest(manifest_path);
            DiffSet diff = compute_diff(m.files, opts.repo, cfg);
            if (diff.empty()) {
                if (opts.json)
                    out << canonical_dump(
                        {{"status", "up-to-date"}, {"snapshot_id", m.snapshot_id}});
                else
                    out << "index up to date (snapshot " << m.snapshot_id << ")\n";
                return 0;
            }
        }

        BuildOutput built = build_graph(opts.repo, cfg);
        CommunityAssignment comm = detect_communities(project_file_graph(built.graph),
                                                      cfg.community_seed, cfg.leiden_resolution);
        RepoGraph graph = built.graph.with_community(std::move(comm));
        save_graph(graph, meta / "graph.json");
        Manifest manifest = make_manifest(graph, built.records, built.file_hashes, 0.0);
        save_manifest(manifest, meta / "manifest.json");
        int written =
            build_sidecars(graph, cfg.sidecar_cap, meta / "sidecars", cfg.flow_max_len);

        if (opts.json) {
            json j = report_to_json(built.report);
            j["snapshot_id"] = graph.snapshot_id();
            j["sidecars_written"] = written;
            out << canonical_dump(j);
        } else {
            out << "indexed " << graph.snapshot_id() << ": ";
            print_report(built.report, out);
            out << "  sidecars: " << written << "\n";
        }
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }
}

int cmd_align(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        IndexConfig cfg = effective_config(opts);
        fs::path meta = repograph_dir(opts.repo);
        if (!fs::exists(meta / "manifest.json") || !fs::exists(meta / "graph.json")) {
            err << "no index at " << meta.string() << "; run `repograph index` first\n";
            return 3;
        }
        Manifest manifest = load_manifest(meta / "manifest.json");
        RepoGraph g_prev = load_graph(meta / "graph.json");
        std::map<std::string, std::string> hashes;
        DiffSet diff = compute_diff(manifest.files, opts.repo, cfg, &hashes);
        if (diff.empty()) {
            if (opts.json)
                out << canonical_dump({{"delta", 0},
                                       {"added", 0},
                                       {"modified", 0},
                                       {"deleted", 0},
                                       {"elapsed_ms", 0.0},
                                       {"snapshot_id", manifest.snapshot_id}});
            else
                out << "delta=0, index untouched (snapshot " << manifest.snapshot_id << ")\n";
            return 0;
        }
        AlignOutcome outcome =
            align_and_save(opts.repo, meta, cfg, g_prev, manifest, diff, hashes);
        if (opts.json) {
            out << canonical_dump({{"delta", diff.size()},
                                   {"added", diff.added.size()},
                                   {"modified", diff.modified.size()},
                                   {"deleted", diff.deleted.size()},
                                   {"elapsed_ms", outcome.elapsed_ms},
                                   {"sidecars_refreshed", outcome.sidecars_refreshed},
                                   {"snapshot_id", outcome.graph.snapshot_id()}});
        } else {
            out << "delta=" << diff.size() << " (+" << diff.added.size() << " ~"
                << diff.modified.size() << " -" << diff.deleted.size() << "), "
                << outcome.elapsed_ms << " ms, " << outcome.sidecars_refreshed
                << " sidecars refreshed (snapshot " << outcome.graph.snapshot_id() << ")\n";
        }
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return e.code() == Errc::stale_manifest ? 3 : 2;
    }
}

int cmd_search(const CommandOptions& opts, const SearchOptions& search_opts, std::ostream& out,
               std::ostream& err) {
    try {
        IndexConfig cfg = effective_config(opts);
        ExpansionConfig& ex = cfg.expansion;
        if (search_opts.k > 0) ex.k = search_opts.k;
        if (search_opts.theta >= 0.0) ex.theta = search_opts.theta;
        if (search_opts.hops > 0) ex.hops = search_opts.hops;
        if (search_opts.anchors > 0) ex.anchor_cap = search_opts.anchors;
        if (search_opts.budget > 0) ex.budget_units = search_opts.budget;

        fs::path meta = repograph_dir(opts.repo);
        if (!fs::exists(meta / "manifest.json") || !fs::exists(meta / "graph.json")) {
            err << "no index at " << meta.string() << "; run `repograph index` first\n";
            return 3;
        }
        Manifest manifest = load_manifest(meta / "manifest.json");
        RepoGraph graph = load_graph(meta / "graph.json");
        if (!search_opts.no_align) {
            std::map<std::string, std::string> hashes;
            DiffSet diff = compute_diff(manifest.files, opts.repo, cfg, &hashes);
            if (!diff.empty()) {
                AlignOutcome outcome =
                    align_and_save(opts.repo, meta, cfg, graph, manifest, diff, hashes);
                graph = std::move(outcome.graph);
                manifest = load_manifest(meta / "manifest.json");
            }
        }

        std::vector<LexicalMatch> matches =
            regex_search(opts.repo, graph.file_paths(), search_opts.pattern);
        json jout;
        if (matches.empty()) {
            if (opts.json) {
                jout["matches"] = json::array();
                jout["evidence"] = "";
                out << canonical_dump(jout);
            }
            return 1;
        }
        std::string match_section = render_match_lines(matches);
        if (!opts.json) out << match_section;

        std::string evidence;
        json janchors = json::array();
        json jgamma = json::array();
        if (!search_opts.no_graph) {
            if (!graph.community())
                raise(Errc::missing_communities, "index has no community assignment");
            AnchorSet anchors = align_matches(matches, graph, ex.anchor_cap);
            Context ctx;
            ctx.budget_units = ex.budget_units;
            std::vector<GammaEntry> gamma =
                expand(anchors, graph, ctx, *graph.community(), ex);
            for (const NodeId& a : anchors.anchors) janchors.push_back(a.key());
            for (const GammaEntry& e : gamma)
                jgamma.push_back({{"node", e.node.key()},
                                  {"score", e.score},
                                  {"source", e.source_anchor.key()}});
            if (!gamma.empty()) {
                int display_cap = search_opts.compact ? 10 : cfg.sidecar_cap;
                display_cap = std::min(display_cap, 3); // keep sections grep-sized
                std::vector<SidecarRecord> sections;
                FlowMap flows; // only derived on the fallback path
                bool flows_ready = false;
                for (const std::string& path : evidence_section_files(gamma)) {
                    try {
                        auto eit = manifest.sidecar_epoch.find(path);
                        std::string expected =
                            eit == manifest.sidecar_epoch.end() ? graph.snapshot_id()
                                                                : eit->second;
                        sections.push_back(load_sidecar(meta / "sidecars", path, expected));
                    } catch (const Error&) {
                        if (!flows_ready) {
                            flows = derive_flows(graph, cfg.flow_max_len);
                            flows_ready = true;
                        }
                        sections.push_back(
                            sidecar_for_file(graph, path, cfg.sidecar_cap, flows));
                    }
                }
                evidence = render_evidence_block(gamma, sections, display_cap);
                if (!opts.json) out << "\n" << evidence;
            }
        }
        if (opts.json) {
            json jmatches = json::array();
            for (const LexicalMatch& m : matches)
                jmatches.push_back({{"path", m.path},
                                    {"line", m.line},
                                    {"column", m.column},
                                    {"text", m.matched_text}});
            jout["matches"] = std::move(jmatches);
            jout["anchors"] = std::move(janchors);
            jout["gamma"] = std::move(jgamma);
            jout["evidence"] = evidence;
            out << canonical_dump(jout);
        }
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }
}

int cmd_sidecar(const CommandOptions& opts, const std::string& file_path, std::ostream& out,
                std::ostream& err) {
    try {
        fs::path meta = repograph_dir(opts.repo);
        if (!fs::exists(meta / "manifest.json")) {
            err << "no index at " << meta.string() << "; run `repograph index` first\n";
            return 3;
        }
        Manifest manifest = load_manifest(meta / "manifest.json");
        auto eit = manifest.sidecar_epoch.find(file_path);
        std::string expected =
            eit == manifest.sidecar_epoch.end() ? manifest.snapshot_id : eit->second;
        SidecarRecord rec = load_sidecar(meta / "sidecars", file_path, expected);
        out << canonical_dump(sidecar_to_json(rec));
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return e.code() == Errc::io_error ? 2 : 1;
    }
}

int cmd_bench_align(const CommandOptions& opts, const BenchOptions& bench, std::ostream& out,
                    std::ostream& err) {
    try {
        IndexConfig cfg = effective_config(opts);
        fs::path work = fs::temp_directory_path() / "repograph_bench";
        std::vector<BenchRow> rows =
            bench_align(bench.sizes, bench.diff_fraction, bench.repetitions, work, cfg);
        if (opts.json) {
            json arr = json::array();
            for (const BenchRow& r : rows)
                arr.push_back({{"size", r.size},
                               {"delta", r.delta},
                               {"rebuild_ms", r.rebuild_ms},
                               {"align_ms", r.align_ms},
                               {"speedup", r.speedup}});
            out << canonical_dump({{"diff_fraction", bench.diff_fraction},
                                   {"repetitions", bench.repetitions},
                                   {"rows", std::move(arr)}});
        } else {
            out << "size\tdelta\trebuild_ms\talign_ms\tspeedup\n";
            for (const BenchRow& r : rows)
                out << r.size << "\t" << r.delta << "\t" << r.rebuild_ms << "\t" << r.align_ms
                    << "\t" << r.speedup << "\n";
        }
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }
}

int cmd_simulate(const CommandOptions& opts, const SimulateOptions& sim, std::ostream& out,
                 std::ostream& err) {
    try {
        IndexConfig cfg = effective_config(opts);
        SyntheticRepoSpec base_spec;
        if (!sim.spec_file.empty())
            base_spec = SyntheticRepoSpec::from_json(json::parse(read_text_file(sim.spec_file)));
        fs::path scratch = fs::temp_directory_path() / "repograph_sim";
        json runs = json::array();
        int violations = 0;
        for (int i = 0; i < sim.seeds; ++i) {
            SyntheticRepoSpec spec = base_spec;
            spec.seed = sim.seed_base + static_cast<uint64_t>(i);
            SimRun run = run_simulation(spec, scratch, cfg.expansion);
            if (!(run.subset_ok && run.monotone_ok && run.gap_ok && run.bound_ok &&
                  run.step_dominance_ok))
                ++violations;
            runs.push_back(sim_run_to_json(run, sim.with_traces));
        }
        if (opts.json) {
            out << canonical_dump({{"spec", base_spec.to_json()},
                                   {"seeds", sim.seeds},
                                   {"violations", violations},
                                   {"runs", std::move(runs)}});
        } else {
            out << sim.seeds << " runs, " << violations << " violation(s)\n";
            for (const auto& r : runs)
                out << "  seed " << r.at("seed") << ": H_T=" << r.at("h_t") << " subset="
                    << r.at("subset_ok") << " gap=" << r.at("gap_ok") << " bound="
                    << r.at("bound_ok") << " steps=" << r.at("step_dominance_ok") << "\n";
        }
        return violations == 0 ? 0 : 1;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }
}

} // namespace repograph
