#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repograph/config.hpp"
#include "repograph/graph.hpp"

namespace repograph {

// A raw, unresolved reference recorded during parsing. Resolution happens
// after the full symbol table exists, so records can be cached and re-linked
// without re-parsing the file.
struct RawRef {
    enum class Kind { import_module, import_from, call, inherit };
    Kind kind = Kind::call;
    std::string text;               // dotted module text or dotted callee/base name
    std::vector<std::string> names; // import_from: "name" or "name|alias"; import_module: optional alias
    int ctx_symbol = -1;            // index into FileRecord::symbols, -1 = file level
    int line = 0;

    auto operator<=>(const RawRef&) const = default;
};

struct SymbolDecl {
    std::string qualified_name;
    NodeKind kind = NodeKind::function;
    Span span;
    std::string signature;
    std::string parent_class; // qualified name of enclosing class when a direct member, else ""

    auto operator<=>(const SymbolDecl&) const = default;
};

// Complete parse output for one file. This is what the manifest caches:
// alignment re-links changed neighborhoods from records instead of
// re-parsing the whole tree.
struct FileRecord {
    std::string path;
    std::string module;  // dotted module path; empty for non-Python files
    std::string adapter; // python | regex | doc | config | ""
    bool is_test = false;
    bool is_doc = false;
    bool is_config = false;
    bool parse_failed = false;
    std::vector<SymbolDecl> symbols;
    std::vector<RawRef> refs;
    std::vector<std::string> mentions; // sorted unique tokens, doc/config files only

    bool operator==(const FileRecord&) const = default;
};

struct LanguageAdapter {
    std::string language_id;
    std::vector<std::string> file_extensions;
    struct Capabilities {
        bool symbols = false;
        bool imports = false;
        bool invokes = false;
        bool inherits = false;
    } capabilities;
    std::function<void(const std::string& content, FileRecord& rec)> parse;
};

const std::vector<LanguageAdapter>& builtin_adapters();

struct ExtractionReport {
    int files_parsed = 0;
    int files_skipped = 0;
    std::map<Provenance, int> edges_by_provenance;
    int unresolved_references = 0;

    int files_visited() const { return files_parsed + files_skipped; }
};

// Name lookup structures for the linking passes.
struct SymbolTable {
    std::map<std::string, std::string> module_to_path;
    std::map<std::string, std::string> path_to_module;
    std::set<std::string> file_paths;
    std::map<std::string, std::map<std::string, std::vector<NodeId>>> file_qualified;
    std::map<std::string, std::map<std::string, std::vector<NodeId>>> file_basename;
    std::map<std::string, std::vector<NodeId>> global_basename;
    std::map<std::string, std::vector<std::string>> file_basename_paths; // "mod.py" -> paths
    std::map<std::string, std::vector<NodeId>> public_toplevel;

    void add_record(const FileRecord& rec);
};

SymbolTable build_symbol_table(const std::map<std::string, FileRecord>& records);

// Local import bindings of one file: name -> (target file, symbol prefix).
struct Binding {
    std::string file_path;
    std::string prefix;
};
using Bindings = std::map<std::string, Binding>;

struct ImportResolution {
    std::string file_path;
    Provenance provenance = Provenance::resolved_import;
};

// Candidate module strings an import text could resolve against, in
// precedence order. Pure function of (importer module, text); alignment
// uses it to find imports whose resolution may flip when files appear
// or disappear.
std::vector<std::string> import_candidate_modules(const std::string& importer_module,
                                                  const std::string& text);

std::optional<ImportResolution> resolve_module(const std::string& importer_module,
                                               const std::string& text, const SymbolTable& symtab);

Bindings compute_bindings(const FileRecord& rec, const SymbolTable& symtab);

struct ResolveResult {
    NodeId target;
    Provenance provenance;
};

// Name resolution for call/inherit references: same-file first, then
// import bindings, then a unique repo-wide basename (fuzzy). Ambiguity
// yields nullopt and no edge.
std::optional<ResolveResult> resolve_reference(const RawRef& ref, const FileRecord& rec,
                                               const Bindings& bindings,
                                               const SymbolTable& symtab);

// Pass-1 linking of one file's references against the symbol table.
struct LinkResult {
    std::vector<Edge> edges;
    int unresolved = 0;
};
LinkResult link_file(const FileRecord& rec, const SymbolTable& symtab);

// Pass-2 cross-artifact links generated by a test/doc/config file.
std::vector<Edge> link_artifact_file(const FileRecord& rec, const SymbolTable& symtab,
                                     const std::map<std::string, FileRecord>& records);

// Nodes, contains edges, and attributes derived purely from records.
void materialize_structure(const std::map<std::string, FileRecord>& records,
                           std::vector<NodeId>& nodes, std::vector<Edge>& edges,
                           std::map<NodeId, std::string>& attributes);

NodeId symbol_node(const FileRecord& rec, const SymbolDecl& decl);
NodeId ref_context_node(const FileRecord& rec, const RawRef& ref);

bool is_test_path(const std::string& path);
std::string module_path_of(const std::string& path);

FileRecord parse_file(const std::string& rel_path, const std::string& content,
                      const IndexConfig& cfg);

// Sorted repo-relative file paths honoring include/exclude globs and
// drop_tests; dot-entries and __pycache__ are always skipped.
std::vector<std::string> scan_worktree(const std::filesystem::path& root, const IndexConfig& cfg);

std::string worktree_snapshot_id(const std::map<std::string, std::string>& file_hashes);

struct BuildOutput {
    RepoGraph graph;
    ExtractionReport report;
    std::map<std::string, FileRecord> records;
    std::map<std::string, std::string> file_hashes;
};

// Two-pass construction: parse every file, then resolve references against
// the complete symbol table, then add cross-artifact links.
BuildOutput build_graph(const std::filesystem::path& root, const IndexConfig& cfg,
                        std::string snapshot_id = "");

} // namespace repograph
