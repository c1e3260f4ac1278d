#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "repograph/extract.hpp"
#include "repograph/graph.hpp"

namespace repograph {

// File-level difference between a cached snapshot and a worktree.
struct DiffSet {
    std::set<std::string> added;
    std::set<std::string> modified;
    std::set<std::string> deleted;

    bool empty() const { return added.empty() && modified.empty() && deleted.empty(); }
    size_t size() const { return added.size() + modified.size() + deleted.size(); }
};

// Cached state of the previous snapshot. Records carry full parse output so
// alignment re-links changed neighborhoods without re-parsing the tree.
struct Manifest {
    std::string snapshot_id;
    std::map<std::string, std::string> files; // path -> content hash
    std::map<std::string, std::vector<std::string>> reverse_refs; // path -> referencing node keys
    double community_epoch_diff_fraction = 0.0;
    // snapshot each file's sidecar was last written under; lets staleness
    // stay per-file when alignment refreshes only the affected sidecars
    std::map<std::string, std::string> sidecar_epoch;
    std::map<std::string, FileRecord> records;
};

// sidecar_epoch defaults to "every file current at graph.snapshot_id()".
Manifest make_manifest(const RepoGraph& graph, const std::map<std::string, FileRecord>& records,
                       const std::map<std::string, std::string>& file_hashes,
                       double community_epoch_diff_fraction,
                       std::map<std::string, std::string> sidecar_epoch = {});

void save_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

// Content-hash diff of the worktree against the manifest's file table.
// out_new_hashes, when given, receives the full new hash table.
DiffSet compute_diff(const std::map<std::string, std::string>& manifest_files,
                     const std::filesystem::path& new_worktree_root, const IndexConfig& cfg,
                     std::map<std::string, std::string>* out_new_hashes = nullptr);

struct AlignOutput {
    RepoGraph graph;
    ExtractionReport report; // covers re-parsed files only
    std::map<std::string, FileRecord> records;
    std::map<std::string, std::string> file_hashes;
    double cumulative_diff_fraction = 0.0;
    // files whose sidecar content is invalidated by this alignment
    std::vector<std::string> sidecar_dirty;
};

// The alignment operator: drops nodes of deleted/modified files, merges in
// the parse output of changed files, re-links only the neighborhoods whose
// resolution environment changed, and carries everything else over
// untouched (edge confidences and community labels included). g_prev is
// never mutated.
AlignOutput align(const RepoGraph& g_prev, const Manifest& manifest, const DiffSet& diff,
                  const std::filesystem::path& new_worktree_root, const IndexConfig& cfg);

// Recomputes communities when the cumulative changed-file fraction since
// the last computation exceeds the threshold; otherwise returns g unchanged.
RepoGraph recompute_if_stale(const RepoGraph& g, double cumulative_fraction,
                             double threshold_fraction, const IndexConfig& cfg);

} // namespace repograph
