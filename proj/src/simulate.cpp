#include "repograph/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "repograph/align.hpp"
#include "repograph/communities.hpp"
#include "repograph/expansion.hpp"
#include "repograph/extract.hpp"
#include "repograph/json_io.hpp"
#include "repograph/search.hpp"
#include "repograph/sidecar.hpp"

namespace repograph {

using nlohmann::json;

SyntheticRepoSpec SyntheticRepoSpec::from_json(const json& j) {
    SyntheticRepoSpec s;
    if (j.contains("file_count")) s.file_count = j.at("file_count").get<int>();
    if (j.contains("min_symbols")) s.min_symbols = j.at("min_symbols").get<int>();
    if (j.contains("max_symbols")) s.max_symbols = j.at("max_symbols").get<int>();
    if (j.contains("import_density")) s.import_density = j.at("import_density").get<double>();
    if (j.contains("invoke_density")) s.invoke_density = j.at("invoke_density").get<double>();
    if (j.contains("inherit_density")) s.inherit_density = j.at("inherit_density").get<double>();
    if (j.contains("fuzzy_density")) s.fuzzy_density = j.at("fuzzy_density").get<double>();
    if (j.contains("target_count")) s.target_count = j.at("target_count").get<int>();
    if (j.contains("visibility")) s.visibility = j.at("visibility").get<double>();
    if (j.contains("packages")) s.packages = j.at("packages").get<int>();
    if (j.contains("with_tests")) s.with_tests = j.at("with_tests").get<bool>();
    if (j.contains("with_docs")) s.with_docs = j.at("with_docs").get<bool>();
    if (j.contains("with_configs")) s.with_configs = j.at("with_configs").get<bool>();
    if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
    return s;
}

json SyntheticRepoSpec::to_json() const {
    return {{"file_count", file_count},
            {"min_symbols", min_symbols},
            {"max_symbols", max_symbols},
            {"import_density", import_density},
            {"invoke_density", invoke_density},
            {"inherit_density", inherit_density},
            {"fuzzy_density", fuzzy_density},
            {"target_count", target_count},
            {"visibility", visibility},
            {"packages", packages},
            {"with_tests", with_tests},
            {"with_docs", with_docs},
            {"with_configs", with_configs},
            {"seed", seed}};
}

namespace {

std::string zero_pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s = "0" + s;
    return s;
}

std::string seed_tag(uint64_t seed) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 8; ++i) {
        out += digits[seed & 0xf];
        seed >>= 4;
    }
    return out;
}

// integer count drawn around a density value: floor plus a Bernoulli on the
// fractional part
int density_count(double density, std::mt19937_64& rng) {
    if (density <= 0.0) return 0;
    int base = static_cast<int>(density);
    double frac = density - base;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return base + (u(rng) < frac ? 1 : 0);
}

struct GenFile {
    std::string path;
    std::string module;
    std::string pkg;
    int index = 0;
    std::vector<std::string> header;  // imports
    std::vector<std::string> body;    // defs
    std::vector<int> imported_files;  // indexes, absolute style
    std::vector<int> from_imported;   // indexes, from-import style
};

} // namespace

PlantedRepo generate_repo(const SyntheticRepoSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.file_count < 1) raise(Errc::infeasible_spec, "file_count must be >= 1");
    if (spec.target_count > 0 && spec.visibility < 1.0 && spec.invoke_density <= 0.0)
        raise(Errc::infeasible_spec,
              "hidden targets need invoke edges to stay reachable (invoke_density is 0)");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int packages = std::max(1, spec.packages);
    std::string tag = seed_tag(spec.seed);

    std::vector<GenFile> files(static_cast<size_t>(spec.file_count));
    for (int i = 0; i < spec.file_count; ++i) {
        GenFile& f = files[static_cast<size_t>(i)];
        f.index = i;
        f.pkg = "pkg_" + std::to_string(i % packages);
        f.path = f.pkg + "/mod_" + zero_pad(i, 3) + ".py";
        f.module = f.pkg + ".mod_" + zero_pad(i, 3);
    }
    auto pick_other = [&](int self) {
        if (spec.file_count == 1) return self;
        std::uniform_int_distribution<int> d(0, spec.file_count - 2);
        int v = d(rng);
        return v >= self ? v + 1 : v;
    };

    // imports
    for (GenFile& f : files) {
        int n_imp = density_count(spec.import_density, rng);
        std::set<int> chosen;
        for (int k = 0; k < n_imp; ++k) {
            int j = pick_other(f.index);
            if (j == f.index || !chosen.insert(j).second) continue;
            const GenFile& t = files[static_cast<size_t>(j)];
            if (u01(rng) < 0.5) {
                f.header.push_back("import " + t.module);
                f.imported_files.push_back(j);
            } else {
                f.header.push_back("from " + t.pkg + " import mod_" + zero_pad(j, 3));
                f.from_imported.push_back(j);
            }
        }
    }

    // symbols and call bodies
    std::uniform_int_distribution<int> sym_count(spec.min_symbols,
                                                 std::max(spec.min_symbols, spec.max_symbols));
    std::vector<std::vector<std::string>> functions(static_cast<size_t>(spec.file_count));
    for (GenFile& f : files) {
        int n_sym = sym_count(rng);
        bool with_class = spec.inherit_density > 0.0 && u01(rng) < spec.inherit_density;
        int n_fn = std::max(1, n_sym - (with_class ? 1 : 0));
        for (int j = 0; j < n_fn; ++j)
            functions[static_cast<size_t>(f.index)].push_back(
                "fn_" + std::to_string(f.index) + "_" + std::to_string(j));
        if (with_class) {
            std::string base;
            if (!f.imported_files.empty()) {
                int j = f.imported_files[rng() % f.imported_files.size()];
                base = files[static_cast<size_t>(j)].module + ".Cls_" + std::to_string(j);
            }
            f.body.push_back("class Cls_" + std::to_string(f.index) +
                             (base.empty() ? ":" : "(" + base + "):"));
            f.body.push_back("    def ping(self):");
            f.body.push_back("        self.pong()");
            f.body.push_back("    def pong(self):");
            f.body.push_back("        return " + std::to_string(f.index));
            f.body.push_back("");
        }
    }
    // every file may or may not own a class; inherits resolve only when the
    // base file actually generated one, which is fine: unresolved is normal
    for (GenFile& f : files) {
        const auto& fns = functions[static_cast<size_t>(f.index)];
        int invokes_left = density_count(spec.invoke_density, rng);
        int fuzzy_left = density_count(spec.fuzzy_density, rng);
        for (size_t j = 0; j < fns.size(); ++j) {
            f.body.push_back("def " + fns[j] + "():");
            std::vector<std::string> calls;
            if (j > 0) calls.push_back(fns[j - 1] + "()"); // same-file chain
            if (invokes_left > 0 && !f.imported_files.empty()) {
                int t = f.imported_files[rng() % f.imported_files.size()];
                const auto& tf = functions[static_cast<size_t>(t)];
                calls.push_back(files[static_cast<size_t>(t)].module + "." +
                                tf[rng() % tf.size()] + "()");
                --invokes_left;
            }
            if (invokes_left > 0 && !f.from_imported.empty()) {
                int t = f.from_imported[rng() % f.from_imported.size()];
                const auto& tf = functions[static_cast<size_t>(t)];
                calls.push_back("mod_" + zero_pad(t, 3) + "." + tf[rng() % tf.size()] + "()");
                --invokes_left;
            }
            if (fuzzy_left > 0) {
                int t = pick_other(f.index);
                if (t != f.index) {
                    const auto& tf = functions[static_cast<size_t>(t)];
                    calls.push_back(tf[rng() % tf.size()] + "()"); // bare name: fuzzy match
                    --fuzzy_left;
                }
            }
            if (calls.empty()) {
                f.body.push_back("    return " + std::to_string(j));
            } else {
                for (const std::string& c : calls) f.body.push_back("    " + c);
            }
            f.body.push_back("");
        }
    }

    // plant targets
    PlantedRepo planted;
    int target_count = std::min(spec.target_count, spec.file_count);
    int visible_count = target_count;
    if (target_count > 0 && spec.visibility < 1.0) {
        visible_count = static_cast<int>(std::llround(spec.visibility * target_count));
        visible_count = std::max(1, std::min(visible_count, target_count));
    }
    int hidden_count = target_count - visible_count;

    std::vector<int> hosts;
    {
        std::vector<int> all(static_cast<size_t>(spec.file_count));
        for (int i = 0; i < spec.file_count; ++i) all[static_cast<size_t>(i)] = i;
        std::shuffle(all.begin(), all.end(), rng);
        hosts.assign(all.begin(),
                     all.begin() + std::min<size_t>(all.size(),
                                                    static_cast<size_t>(target_count) * 2));
    }
    std::vector<std::pair<int, std::string>> hidden_plants; // (host file, fn name)
    for (int h = 0; h < hidden_count; ++h) {
        int host = hosts[static_cast<size_t>(visible_count + h) % hosts.size()];
        std::string name = "veil_" + tag + "_" + std::to_string(h);
        GenFile& f = files[static_cast<size_t>(host)];
        f.body.push_back("def " + name + "():");
        f.body.push_back("    return " + std::to_string(h));
        f.body.push_back("");
        hidden_plants.push_back({host, name});
        planted.hidden.push_back({f.path, name});
    }
    for (int v = 0; v < visible_count; ++v) {
        int host = hosts[static_cast<size_t>(v) % hosts.size()];
        std::string name = "seek_" + tag + "_" + std::to_string(v);
        GenFile& f = files[static_cast<size_t>(host)];
        std::vector<std::string> calls;
        for (int h = 0; h < hidden_count; ++h) {
            if (h % visible_count != v) continue;
            const auto& [hidden_host, hidden_name] = hidden_plants[static_cast<size_t>(h)];
            const GenFile& hf = files[static_cast<size_t>(hidden_host)];
            if (hidden_host != f.index) {
                f.header.push_back("import " + hf.module);
                calls.push_back(hf.module + "." + hidden_name + "()");
            } else {
                calls.push_back(hidden_name + "()");
            }
        }
        f.body.push_back("def " + name + "():");
        if (calls.empty()) f.body.push_back("    return " + std::to_string(v));
        for (const std::string& c : calls) f.body.push_back("    " + c);
        f.body.push_back("");
        planted.visible.push_back({f.path, name});
        planted.queries.push_back("\\b" + name + "\\b");
    }

    // write the tree
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    for (const GenFile& f : files) {
        std::string content = "\"\"\"Module " + f.module + ".\"\"\"\n";
        std::vector<std::string> header = f.header;
        std::sort(header.begin(), header.end());
        header.erase(std::unique(header.begin(), header.end()), header.end());
        for (const std::string& h : header) content += h + "\n";
        content += "\n";
        for (const std::string& b : f.body) content += b + "\n";
        write_text_file(out_dir / f.path, content);
    }
    if (spec.with_tests && spec.file_count >= 2) {
        const GenFile& t0 = files[0];
        std::string content = "import " + t0.module + "\n\n\ndef test_roundtrip():\n    " +
                              t0.module + "." + functions[0][0] + "()\n";
        write_text_file(out_dir / ("tests/test_mod_" + zero_pad(0, 3) + ".py"), content);
    }
    if (spec.with_docs) {
        std::string content = "# Overview\n\nGenerated corpus.\n\nEntry module: `" +
                              files[0].path + "`.\n";
        if (spec.file_count >= 2) content += "See also `" + files[1].path + "`.\n";
        write_text_file(out_dir / "README.md", content);
    }
    if (spec.with_configs) {
        std::string content = "[tool.corpus]\nroot_module = \"" + files[0].module + "\"\n";
        write_text_file(out_dir / "settings.toml", content);
    }
    return planted;
}

json trace_to_json(const RunTrace& t) {
    json steps = json::array();
    for (const StepTrace& s : t.steps) {
        steps.push_back({{"step", s.step},
                         {"anchors", s.anchors},
                         {"gamma_size", s.gamma_size},
                         {"gamma_cost", s.gamma_cost},
                         {"members", s.members},
                         {"hits", s.hits},
                         {"recall", s.recall},
                         {"rendered_cost", s.rendered_cost},
                         {"budget_saturated", s.budget_saturated}});
    }
    return {{"regime", t.regime}, {"y_size", t.y_size}, {"steps", std::move(steps)}};
}

RegimePair run_regimes(const std::filesystem::path& worktree, const RepoGraph& g,
                       const std::set<NodeId>& y, const std::vector<std::string>& queries,
                       const ExpansionConfig& cfg) {
    if (!g.community()) raise(Errc::missing_communities, "index the worktree first");
    const CommunityAssignment& comm = *g.community();

    RegimePair pair;
    pair.lex.regime = "lex";
    pair.larger.regime = "larger";
    pair.lex.y_size = pair.larger.y_size = static_cast<int>(y.size());

    Context ctx_lex, ctx_larger;
    ctx_lex.budget_units = ctx_larger.budget_units = cfg.budget_units;
    std::vector<std::string> file_list = g.file_paths();

    auto record_step = [&](RunTrace& trace, int step, const AnchorSet& anchors,
                           const std::vector<GammaEntry>& gamma, const Context& ctx) {
        StepTrace st;
        st.step = step;
        for (const NodeId& a : anchors.anchors) st.anchors.push_back(a.key());
        st.gamma_size = static_cast<int>(gamma.size());
        for (const GammaEntry& e : gamma) st.gamma_cost += render_cost(e.node, cfg);
        for (const NodeId& m : ctx.members) st.members.push_back(m.key());
        for (const NodeId& m : ctx.members)
            if (y.count(m)) ++st.hits;
        st.recall = y.empty() ? 0.0 : static_cast<double>(st.hits) / static_cast<double>(y.size());
        st.rendered_cost = ctx.units_used;
        st.budget_saturated = ctx.saturated;
        trace.steps.push_back(std::move(st));
    };

    for (size_t t = 0; t < queries.size(); ++t) {
        std::vector<LexicalMatch> matches = regex_search(worktree, file_list, queries[t]);
        AnchorSet anchors = align_matches(matches, g, cfg.anchor_cap);
        anchors.step_index = static_cast<int>(t) + 1;

        ctx_lex = fold_context(ctx_lex, anchors, {}, cfg);
        record_step(pair.lex, anchors.step_index, anchors, {}, ctx_lex);

        std::vector<GammaEntry> gamma = expand(anchors, g, ctx_larger, comm, cfg);
        ctx_larger = fold_context(ctx_larger, anchors, gamma, cfg);
        record_step(pair.larger, anchors.step_index, anchors, gamma, ctx_larger);
    }
    return pair;
}

int steps_to_recall(const RunTrace& trace, double r) {
    for (const StepTrace& s : trace.steps)
        if (s.recall >= r) return s.step;
    return std::numeric_limits<int>::max();
}

TokenCostReport token_cost_check(const RegimePair& pair, int per_step_lex_cost, int delta_cap,
                                 double target_recall) {
    TokenCostReport rep;
    rep.delta_cap = delta_cap;
    for (const StepTrace& s : pair.larger.steps) {
        rep.max_gamma_cost = std::max(rep.max_gamma_cost, s.gamma_cost);
        if (s.gamma_cost > delta_cap) rep.gamma_within_cap = false;
    }
    for (const StepTrace& s : pair.lex.steps)
        if (s.gamma_cost != 0) rep.gamma_within_cap = false;
    rep.t_lex = steps_to_recall(pair.lex, target_recall);
    rep.t_larger = steps_to_recall(pair.larger, target_recall);
    rep.overhead_ratio = static_cast<double>(delta_cap) /
                         static_cast<double>(per_step_lex_cost + delta_cap);
    if (rep.t_lex != std::numeric_limits<int>::max() && rep.t_lex > 0 &&
        rep.t_larger != std::numeric_limits<int>::max()) {
        rep.step_savings_ratio =
            static_cast<double>(rep.t_lex - rep.t_larger) / static_cast<double>(rep.t_lex);
        rep.strict_dominance_condition = rep.step_savings_ratio > rep.overhead_ratio;
    }
    return rep;
}

SimRun run_simulation(const SyntheticRepoSpec& spec, const std::filesystem::path& scratch_dir,
                      const ExpansionConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path tree = scratch_dir / ("sim_" + std::to_string(spec.seed));
    std::error_code ec;
    fs::remove_all(tree, ec);
    PlantedRepo planted = generate_repo(spec, tree);

    IndexConfig icfg;
    icfg.expansion = cfg;
    BuildOutput built = build_graph(tree, icfg);
    CommunityAssignment comm =
        detect_communities(project_file_graph(built.graph), icfg.community_seed);
    RepoGraph g = built.graph.with_community(std::move(comm));

    std::set<NodeId> y;
    auto resolve_target = [&](const std::pair<std::string, std::string>& target) {
        for (const NodeId& n : g.symbols_in_file(target.first))
            if (n.qualified_name == target.second) return n;
        raise(Errc::infeasible_spec,
              "planted target " + target.second + " missing from " + target.first);
    };
    for (const auto& t : planted.visible) y.insert(resolve_target(t));
    for (const auto& t : planted.hidden) y.insert(resolve_target(t));

    SimRun run;
    run.seed = spec.seed;
    run.visibility = spec.visibility;
    run.y_size = static_cast<int>(y.size());
    run.visible_count = static_cast<int>(planted.visible.size());
    run.hidden_count = static_cast<int>(planted.hidden.size());

    RegimePair pair = run_regimes(tree, g, y, planted.queries, cfg);
    run.lex = std::move(pair.lex);
    run.larger = std::move(pair.larger);

    // exact theory-suite checks over the paired traces
    std::set<std::string> prev_lex, prev_larger;
    int prev_hits_lex = 0, prev_hits_larger = 0;
    for (size_t i = 0; i < run.lex.steps.size(); ++i) {
        const StepTrace& sl = run.lex.steps[i];
        const StepTrace& sg = run.larger.steps[i];
        std::set<std::string> ml(sl.members.begin(), sl.members.end());
        std::set<std::string> mg(sg.members.begin(), sg.members.end());
        for (const std::string& k : ml)
            if (!mg.count(k)) run.subset_ok = false;
        if (!std::includes(ml.begin(), ml.end(), prev_lex.begin(), prev_lex.end()))
            run.monotone_ok = false;
        if (!std::includes(mg.begin(), mg.end(), prev_larger.begin(), prev_larger.end()))
            run.monotone_ok = false;
        if (sl.hits < prev_hits_lex || sg.hits < prev_hits_larger) run.monotone_ok = false;
        if (sg.gamma_size > cfg.anchor_cap * cfg.k) run.bound_ok = false;
        if (sg.gamma_cost > cfg.anchor_cap * cfg.k * cfg.node_render_cap) run.bound_ok = false;
        if (sl.budget_saturated || sg.budget_saturated) run.budget_saturated = true;
        prev_lex = std::move(ml);
        prev_larger = std::move(mg);
        prev_hits_lex = sl.hits;
        prev_hits_larger = sg.hits;
    }
    if (!run.lex.steps.empty()) {
        const StepTrace& final_lex = run.lex.steps.back();
        const StepTrace& final_larger = run.larger.steps.back();
        std::set<std::string> ml(final_lex.members.begin(), final_lex.members.end());
        std::set<std::string> y_keys;
        for (const NodeId& n : y) y_keys.insert(n.key());
        for (const std::string& k : final_larger.members)
            if (!ml.count(k) && y_keys.count(k)) ++run.h_t;
        run.gap_ok = (final_larger.hits - final_lex.hits) == run.h_t;
    }
    for (double r : {0.25, 0.5, 0.75, 1.0})
        if (steps_to_recall(run.larger, r) > steps_to_recall(run.lex, r))
            run.step_dominance_ok = false;

    fs::remove_all(tree, ec);
    return run;
}

nlohmann::json sim_run_to_json(const SimRun& run, bool with_traces) {
    json j = {{"seed", run.seed},
              {"visibility", run.visibility},
              {"y_size", run.y_size},
              {"visible", run.visible_count},
              {"hidden", run.hidden_count},
              {"h_t", run.h_t},
              {"subset_ok", run.subset_ok},
              {"monotone_ok", run.monotone_ok},
              {"gap_ok", run.gap_ok},
              {"bound_ok", run.bound_ok},
              {"step_dominance_ok", run.step_dominance_ok},
              {"budget_saturated", run.budget_saturated}};
    if (with_traces) {
        j["trace_lex"] = trace_to_json(run.lex);
        j["trace_larger"] = trace_to_json(run.larger);
    }
    return j;
}

std::vector<BenchRow> bench_align(const std::vector<int>& sizes, double diff_fraction,
                                  int repetitions, const std::filesystem::path& work_dir,
                                  const IndexConfig& cfg) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };

    std::vector<BenchRow> rows;
    for (int size : sizes) {
        SyntheticRepoSpec spec;
        spec.file_count = size;
        spec.target_count = 0;
        spec.visibility = 1.0;
        spec.seed = 4242u + static_cast<uint64_t>(size);
        fs::path tree = work_dir / ("bench_" + std::to_string(size));
        std::error_code ec;
        fs::remove_all(tree, ec);
        generate_repo(spec, tree);

        BuildOutput base = build_graph(tree, cfg);
        CommunityAssignment comm =
            detect_communities(project_file_graph(base.graph), cfg.community_seed);
        RepoGraph g0 = base.graph.with_community(std::move(comm));
        Manifest manifest = make_manifest(g0, base.records, base.file_hashes, 0.0);

        // edit script: touch diff_fraction of the files
        int touched = std::max(1, static_cast<int>(std::llround(diff_fraction * size)));
        std::vector<std::string> paths = g0.file_paths();
        std::vector<std::string> py_paths;
        for (const std::string& p : paths)
            if (p.size() > 3 && p.compare(p.size() - 3, 3, ".py") == 0 &&
                p.rfind("tests/", 0) != 0)
                py_paths.push_back(p);
        touched = std::min<int>(touched, static_cast<int>(py_paths.size()));
        for (int i = 0; i < touched; ++i) {
            const std::string& p =
                py_paths[static_cast<size_t>(i) * py_paths.size() / static_cast<size_t>(touched)];
            std::string content = read_text_file(tree / p);
            content += "\n\ndef touched_" + std::to_string(i) + "():\n    return None\n";
            write_text_file(tree / p, content);
        }

        std::vector<double> rebuild_times, align_times;
        int delta = 0;
        for (int rep = 0; rep < repetitions; ++rep) {
            fs::path out_a = work_dir / "bench_sidecars_rebuild";
            auto t0 = clock::now();
            BuildOutput rebuilt = build_graph(tree, cfg);
            CommunityAssignment c2 =
                detect_communities(project_file_graph(rebuilt.graph), cfg.community_seed);
            RepoGraph g2 = rebuilt.graph.with_community(std::move(c2));
            build_sidecars(g2, cfg.sidecar_cap, out_a, cfg.flow_max_len);
            rebuild_times.push_back(ms_since(t0));

            fs::path out_b = work_dir / "bench_sidecars_align";
            auto t1 = clock::now();
            DiffSet diff = compute_diff(manifest.files, tree, cfg);
            AlignOutput aligned = align(g0, manifest, diff, tree, cfg);
            build_sidecars_for(aligned.graph, cfg.sidecar_cap, out_b, aligned.sidecar_dirty,
                               cfg.flow_max_len);
            align_times.push_back(ms_since(t1));
            delta = static_cast<int>(diff.size());
        }
        BenchRow row;
        row.size = size;
        row.delta = delta;
        row.rebuild_ms = median(rebuild_times);
        row.align_ms = median(align_times);
        row.speedup = row.align_ms > 0.0 ? row.rebuild_ms / row.align_ms : 0.0;
        rows.push_back(row);
        fs::remove_all(tree, ec);
    }
    return rows;
}

} // namespace repograph
