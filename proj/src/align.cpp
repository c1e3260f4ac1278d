#include "repograph/align.hpp"

#include <algorithm>

#include "repograph/communities.hpp"
#include "repograph/hash.hpp"
#include "repograph/json_io.hpp"
#include "repograph/sidecar.hpp"

namespace repograph {

using nlohmann::json;

namespace {

json record_to_json(const FileRecord& rec) {
    json j;
    j["module"] = rec.module;
    j["adapter"] = rec.adapter;
    j["is_test"] = rec.is_test;
    j["is_doc"] = rec.is_doc;
    j["is_config"] = rec.is_config;
    j["parse_failed"] = rec.parse_failed;
    json symbols = json::array();
    for (const SymbolDecl& s : rec.symbols)
        symbols.push_back({s.qualified_name, to_string(s.kind), s.span.start, s.span.end,
                           s.signature, s.parent_class});
    j["symbols"] = std::move(symbols);
    json refs = json::array();
    for (const RawRef& r : rec.refs) {
        int kind = static_cast<int>(r.kind);
        refs.push_back({kind, r.text, r.names, r.ctx_symbol, r.line});
    }
    j["refs"] = std::move(refs);
    j["mentions"] = rec.mentions;
    return j;
}

FileRecord record_from_json(const std::string& path, const json& j) {
    FileRecord rec;
    rec.path = path;
    rec.module = j.at("module").get<std::string>();
    rec.adapter = j.at("adapter").get<std::string>();
    rec.is_test = j.at("is_test").get<bool>();
    rec.is_doc = j.at("is_doc").get<bool>();
    rec.is_config = j.at("is_config").get<bool>();
    rec.parse_failed = j.at("parse_failed").get<bool>();
    for (const auto& s : j.at("symbols")) {
        SymbolDecl d;
        d.qualified_name = s.at(0).get<std::string>();
        d.kind = node_kind_from_string(s.at(1).get<std::string>());
        d.span = {s.at(2).get<int>(), s.at(3).get<int>()};
        d.signature = s.at(4).get<std::string>();
        d.parent_class = s.at(5).get<std::string>();
        rec.symbols.push_back(std::move(d));
    }
    for (const auto& r : j.at("refs")) {
        RawRef ref;
        ref.kind = static_cast<RawRef::Kind>(r.at(0).get<int>());
        ref.text = r.at(1).get<std::string>();
        ref.names = r.at(2).get<std::vector<std::string>>();
        ref.ctx_symbol = r.at(3).get<int>();
        ref.line = r.at(4).get<int>();
        rec.refs.push_back(std::move(ref));
    }
    rec.mentions = j.at("mentions").get<std::vector<std::string>>();
    return rec;
}

} // namespace

Manifest make_manifest(const RepoGraph& graph, const std::map<std::string, FileRecord>& records,
                       const std::map<std::string, std::string>& file_hashes,
                       double community_epoch_diff_fraction,
                       std::map<std::string, std::string> sidecar_epoch) {
    Manifest m;
    m.snapshot_id = graph.snapshot_id();
    m.files = file_hashes;
    m.community_epoch_diff_fraction = community_epoch_diff_fraction;
    m.records = records;
    for (const Edge& e : graph.edges()) {
        if (!e.is_semantic() || e.src.path == e.dst.path) continue;
        m.reverse_refs[e.dst.path].push_back(e.src.key());
    }
    for (auto& [_, keys] : m.reverse_refs) {
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    }
    if (sidecar_epoch.empty())
        for (const auto& [path, _] : file_hashes) sidecar_epoch[path] = m.snapshot_id;
    m.sidecar_epoch = std::move(sidecar_epoch);
    return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
    json j;
    j["snapshot_id"] = m.snapshot_id;
    j["files"] = m.files;
    j["reverse_refs"] = m.reverse_refs;
    j["community_epoch_diff_fraction"] = m.community_epoch_diff_fraction;
    j["sidecar_epoch"] = m.sidecar_epoch;
    json records = json::object();
    for (const auto& [p, rec] : m.records) records[p] = record_to_json(rec);
    j["records"] = std::move(records);
    write_text_file(path, canonical_dump(j));
}

Manifest load_manifest(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path));
    Manifest m;
    m.snapshot_id = j.at("snapshot_id").get<std::string>();
    m.files = j.at("files").get<std::map<std::string, std::string>>();
    m.reverse_refs =
        j.at("reverse_refs").get<std::map<std::string, std::vector<std::string>>>();
    m.community_epoch_diff_fraction = j.at("community_epoch_diff_fraction").get<double>();
    m.sidecar_epoch = j.at("sidecar_epoch").get<std::map<std::string, std::string>>();
    for (const auto& [p, rec] : j.at("records").items())
        m.records[p] = record_from_json(p, rec);
    return m;
}

DiffSet compute_diff(const std::map<std::string, std::string>& manifest_files,
                     const std::filesystem::path& new_worktree_root, const IndexConfig& cfg,
                     std::map<std::string, std::string>* out_new_hashes) {
    DiffSet diff;
    std::map<std::string, std::string> now;
    for (const std::string& rel : scan_worktree(new_worktree_root, cfg))
        now[rel] = fnv1a64_hex(read_text_file(new_worktree_root / rel));
    for (const auto& [path, hash] : now) {
        auto it = manifest_files.find(path);
        if (it == manifest_files.end())
            diff.added.insert(path);
        else if (it->second != hash)
            diff.modified.insert(path);
    }
    for (const auto& [path, _] : manifest_files)
        if (!now.count(path)) diff.deleted.insert(path);
    if (out_new_hashes) *out_new_hashes = std::move(now);
    return diff;
}

namespace {

// Symbol basenames whose definition count changes, per changed file pair.
void collect_flipped_basenames(const FileRecord* old_rec, const FileRecord* new_rec,
                               std::set<std::string>& out) {
    std::map<std::string, int> delta;
    auto basename = [](const std::string& q) {
        auto dot = q.rfind('.');
        return dot == std::string::npos ? q : q.substr(dot + 1);
    };
    if (old_rec)
        for (const SymbolDecl& s : old_rec->symbols) --delta[basename(s.qualified_name)];
    if (new_rec)
        for (const SymbolDecl& s : new_rec->symbols) ++delta[basename(s.qualified_name)];
    for (const auto& [name, d] : delta)
        if (d != 0) out.insert(name);
}

void collect_public_names(const FileRecord* rec, std::set<std::string>& out) {
    if (!rec) return;
    for (const SymbolDecl& s : rec->symbols)
        if (s.qualified_name.find('.') == std::string::npos && s.qualified_name[0] != '_')
            out.insert(s.qualified_name);
}

std::string file_basename_str(const std::string& path) {
    auto slash = path.rfind('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

} // namespace

AlignOutput align(const RepoGraph& g_prev, const Manifest& manifest, const DiffSet& diff,
                  const std::filesystem::path& new_worktree_root, const IndexConfig& cfg) {
    if (manifest.snapshot_id != g_prev.snapshot_id())
        raise(Errc::stale_manifest, "manifest snapshot does not match cached graph");
    for (const std::string& p : diff.deleted)
        if (!manifest.files.count(p))
            raise(Errc::stale_manifest, "diff deletes unknown path " + p);
    for (const std::string& p : diff.modified)
        if (!manifest.files.count(p))
            raise(Errc::stale_manifest, "diff modifies unknown path " + p);
    for (const std::string& p : diff.added)
        if (manifest.files.count(p))
            raise(Errc::stale_manifest, "diff adds already-known path " + p);

    ExtractionReport report;
    std::map<std::string, FileRecord> records = manifest.records;
    std::map<std::string, std::string> hashes = manifest.files;
    std::set<std::string> removed_or_changed;
    for (const std::string& p : diff.deleted) {
        records.erase(p);
        hashes.erase(p);
        removed_or_changed.insert(p);
    }
    for (const std::string& p : diff.modified) removed_or_changed.insert(p);

    std::set<std::string> reparse;
    reparse.insert(diff.added.begin(), diff.added.end());
    reparse.insert(diff.modified.begin(), diff.modified.end());
    for (const std::string& p : reparse) {
        std::string content = read_text_file(new_worktree_root / p);
        FileRecord rec = parse_file(p, content, cfg);
        if (!rec.adapter.empty() && !rec.parse_failed)
            ++report.files_parsed;
        else
            ++report.files_skipped;
        hashes[p] = fnv1a64_hex(content);
        records[p] = std::move(rec);
    }

    // dirtiness triggers: name/module/path deltas that can flip resolution
    std::set<std::string> flipped_basenames;
    std::set<std::string> changed_modules;
    std::set<std::string> changed_paths_tokens; // paths + file basenames of added/deleted
    std::set<std::string> changed_public_names;
    for (const std::string& p : diff.deleted) {
        const FileRecord& old_rec = manifest.records.at(p);
        collect_flipped_basenames(&old_rec, nullptr, flipped_basenames);
        collect_public_names(&old_rec, changed_public_names);
        if (!old_rec.module.empty()) changed_modules.insert(old_rec.module);
        changed_paths_tokens.insert(p);
        changed_paths_tokens.insert(file_basename_str(p));
    }
    for (const std::string& p : diff.added) {
        const FileRecord& new_rec = records.at(p);
        collect_flipped_basenames(nullptr, &new_rec, flipped_basenames);
        collect_public_names(&new_rec, changed_public_names);
        if (!new_rec.module.empty()) changed_modules.insert(new_rec.module);
        changed_paths_tokens.insert(p);
        changed_paths_tokens.insert(file_basename_str(p));
    }
    for (const std::string& p : diff.modified) {
        const FileRecord& old_rec = manifest.records.at(p);
        const FileRecord& new_rec = records.at(p);
        collect_flipped_basenames(&old_rec, &new_rec, flipped_basenames);
        std::set<std::string> old_pub, new_pub;
        collect_public_names(&old_rec, old_pub);
        collect_public_names(&new_rec, new_pub);
        for (const std::string& n : old_pub)
            if (!new_pub.count(n)) changed_public_names.insert(n);
        for (const std::string& n : new_pub)
            if (!old_pub.count(n)) changed_public_names.insert(n);
    }

    std::set<std::string> dirty_link; // files whose references re-resolve
    for (const std::string& p : reparse) dirty_link.insert(p);
    for (const std::string& p : removed_or_changed) {
        auto it = manifest.reverse_refs.find(p);
        if (it == manifest.reverse_refs.end()) continue;
        for (const std::string& key : it->second) {
            std::string referrer = NodeId::from_key(key).path;
            if (records.count(referrer)) dirty_link.insert(referrer);
        }
    }
    bool any_name_flip = !flipped_basenames.empty() || !changed_modules.empty() ||
                         !changed_paths_tokens.empty();
    if (any_name_flip) {
        for (const auto& [path, rec] : records) {
            if (dirty_link.count(path)) continue;
            bool dirty = false;
            for (const RawRef& ref : rec.refs) {
                if (ref.kind == RawRef::Kind::call || ref.kind == RawRef::Kind::inherit) {
                    if (ref.text.find('.') == std::string::npos &&
                        flipped_basenames.count(ref.text)) {
                        dirty = true;
                        break;
                    }
                } else {
                    for (const std::string& cand :
                         import_candidate_modules(rec.module, ref.text))
                        if (changed_modules.count(cand)) {
                            dirty = true;
                            break;
                        }
                    if (!dirty && changed_paths_tokens.count(ref.text)) dirty = true;
                    if (dirty) break;
                }
            }
            if (dirty) dirty_link.insert(path);
        }
    }

    std::set<std::string> dirty_artifact; // test/doc/config files to re-emit
    std::set<std::string> mention_tokens = changed_paths_tokens;
    mention_tokens.insert(changed_modules.begin(), changed_modules.end());
    mention_tokens.insert(changed_public_names.begin(), changed_public_names.end());
    for (const auto& [path, rec] : records) {
        if (!(rec.is_test || rec.is_doc || rec.is_config)) continue;
        if (dirty_link.count(path) || reparse.count(path)) {
            dirty_artifact.insert(path);
            continue;
        }
        if (mention_tokens.empty()) continue;
        for (const std::string& tok : rec.mentions)
            if (mention_tokens.count(tok)) {
                dirty_artifact.insert(path);
                break;
            }
    }

    // structure is regenerated wholesale from records; semantic edges are
    // carried from g_prev except where this alignment owns the re-link
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    std::map<NodeId, std::string> attributes;
    materialize_structure(records, nodes, edges, attributes);

    SymbolTable symtab = build_symbol_table(records);
    for (const Edge& e : g_prev.edges()) {
        if (!e.is_semantic()) continue;
        if (removed_or_changed.count(e.src.path) || removed_or_changed.count(e.dst.path))
            continue;
        if (e.is_cross_artifact()) {
            if (dirty_artifact.count(e.dst.path)) continue;
        } else {
            if (dirty_link.count(e.src.path)) continue;
        }
        edges.push_back(e);
    }
    for (const std::string& p : dirty_link) {
        LinkResult linked = link_file(records.at(p), symtab);
        report.unresolved_references += linked.unresolved;
        for (Edge& e : linked.edges) edges.push_back(std::move(e));
    }
    for (const std::string& p : dirty_artifact)
        for (Edge& e : link_artifact_file(records.at(p), symtab, records))
            edges.push_back(std::move(e));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const Edge& e : edges) ++report.edges_by_provenance[e.provenance];

    // community labels carry over; new files adopt their strongest
    // neighbor's community or open a fresh singleton
    std::optional<CommunityAssignment> community;
    if (g_prev.community()) {
        const CommunityAssignment& old = *g_prev.community();
        CommunityAssignment next;
        std::set<std::string> file_set;
        for (const auto& [path, _] : records) file_set.insert(path);
        int max_id = -1;
        for (const std::string& path : file_set) {
            auto it = old.kappa.find(path);
            if (it == old.kappa.end()) continue;
            next.kappa[path] = it->second;
            max_id = std::max(max_id, it->second);
            auto coh = old.cohesion.find(path);
            next.cohesion[path] = coh == old.cohesion.end() ? 1.0 : coh->second;
        }
        std::map<int, double> community_cohesion;
        for (const auto& [path, id] : next.kappa)
            community_cohesion.emplace(id, next.cohesion.at(path));
        for (const std::string& path : file_set) {
            if (next.kappa.count(path)) continue;
            std::map<std::string, double> neighbor_weight;
            for (const Edge& e : edges) {
                if (!e.is_semantic()) continue;
                std::string other;
                if (e.src.path == path && e.dst.path != path) other = e.dst.path;
                else if (e.dst.path == path && e.src.path != path) other = e.src.path;
                else continue;
                if (next.kappa.count(other)) neighbor_weight[other] += 1.0;
            }
            if (!neighbor_weight.empty()) {
                auto best = neighbor_weight.begin();
                for (auto it = std::next(neighbor_weight.begin()); it != neighbor_weight.end();
                     ++it)
                    if (it->second > best->second) best = it;
                int id = next.kappa.at(best->first);
                next.kappa[path] = id;
                next.cohesion[path] = community_cohesion.count(id) ? community_cohesion.at(id)
                                                                   : 1.0;
            } else {
                int id = ++max_id;
                next.kappa[path] = id;
                next.cohesion[path] = 1.0;
                community_cohesion[id] = 1.0;
            }
        }
        std::set<int> live_ids;
        for (const auto& [_, id] : next.kappa) live_ids.insert(id);
        for (int id : live_ids) {
            auto it = old.labels.find(id);
            if (it != old.labels.end()) {
                next.labels[id] = it->second;
            } else {
                std::vector<std::string> members;
                for (const auto& [path, cid] : next.kappa)
                    if (cid == id) members.push_back(path);
                next.labels[id] = label_community(members);
            }
        }
        double fraction = manifest.community_epoch_diff_fraction +
                          static_cast<double>(diff.size()) /
                              std::max<size_t>(size_t{1}, file_set.size());
        next.stale = fraction > cfg.stale_threshold;
        community = std::move(next);
    }

    std::string snapshot = worktree_snapshot_id(hashes);
    RepoGraph graph(snapshot, std::move(nodes), std::move(edges), std::move(attributes),
                    std::move(community));

    // sidecars to refresh: every file touching an edge that appeared or
    // vanished, plus re-parsed files, plus files whose flow annotations
    // shifted because a call chain changed elsewhere
    std::vector<Edge> removed_edges, added_edges;
    std::set_difference(g_prev.edges().begin(), g_prev.edges().end(), graph.edges().begin(),
                        graph.edges().end(), std::back_inserter(removed_edges));
    std::set_difference(graph.edges().begin(), graph.edges().end(), g_prev.edges().begin(),
                        g_prev.edges().end(), std::back_inserter(added_edges));
    std::set<std::string> dirty_sidecars(reparse.begin(), reparse.end());
    auto touch = [&](const Edge& e) {
        if (e.src.kind != NodeKind::directory) dirty_sidecars.insert(e.src.path);
        if (e.dst.kind != NodeKind::directory) dirty_sidecars.insert(e.dst.path);
    };
    for (const Edge& e : removed_edges) touch(e);
    for (const Edge& e : added_edges) touch(e);
    if (!removed_edges.empty() || !added_edges.empty()) {
        FlowMap flows_prev = derive_flows(g_prev, cfg.flow_max_len);
        FlowMap flows_next = derive_flows(graph, cfg.flow_max_len);
        for (const auto& [path, steps] : flows_next) {
            auto it = flows_prev.find(path);
            if (it == flows_prev.end() || it->second != steps) dirty_sidecars.insert(path);
        }
        for (const auto& [path, _] : flows_prev)
            if (!flows_next.count(path)) dirty_sidecars.insert(path);
    }
    std::vector<std::string> sidecar_dirty;
    for (const std::string& p : dirty_sidecars)
        if (records.count(p)) sidecar_dirty.push_back(p);

    double fraction = manifest.community_epoch_diff_fraction +
                      static_cast<double>(diff.size()) /
                          std::max<size_t>(size_t{1}, records.size());
    return AlignOutput{std::move(graph), std::move(report), std::move(records),
                       std::move(hashes), fraction, std::move(sidecar_dirty)};
}

RepoGraph recompute_if_stale(const RepoGraph& g, double cumulative_fraction,
                             double threshold_fraction, const IndexConfig& cfg) {
    if (!(cumulative_fraction > threshold_fraction)) return g;
    FileGraph fg = project_file_graph(g);
    CommunityAssignment comm = detect_communities(fg, cfg.community_seed, cfg.leiden_resolution);
    return g.with_community(std::move(comm));
}

} // namespace repograph
