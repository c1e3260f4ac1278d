#include "repograph/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "repograph/hash.hpp"
#include "repograph/json_io.hpp"

namespace repograph {

namespace {

const std::set<std::string>& call_noise_words() {
    // Python keywords plus builtins that never resolve to repo symbols.
    static const std::set<std::string> words = {
        "if", "elif", "while", "for", "return", "yield", "with", "assert", "raise",
        "except", "lambda", "and", "or", "not", "in", "is", "del", "pass", "else",
        "try", "finally", "global", "nonlocal", "import", "from", "as", "def", "class",
        "print", "len", "range", "str", "int", "float", "list", "dict", "set", "tuple",
        "super", "isinstance", "issubclass", "enumerate", "zip", "map", "filter",
        "sorted", "reversed", "open", "type", "getattr", "setattr", "hasattr", "repr",
        "hash", "id", "min", "max", "sum", "abs", "any", "all", "next", "iter", "vars",
        "format", "input", "bool", "bytes", "object", "callable", "round", "divmod",
        "Exception", "ValueError", "TypeError", "KeyError", "IndexError", "RuntimeError",
        "AttributeError", "NotImplementedError", "StopIteration", "OSError", "IOError",
    };
    return words;
}

std::vector<std::string> split_dotted(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == '.') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string join_dotted(const std::vector<std::string>& segs, size_t from, size_t to) {
    std::string out;
    for (size_t i = from; i < to; ++i) {
        if (!out.empty()) out += '.';
        out += segs[i];
    }
    return out;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string basename_of(const std::string& qualified) {
    auto dot = qualified.rfind('.');
    return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

std::string path_basename(const std::string& path) {
    auto slash = path.rfind('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string extension_of(const std::string& path) {
    std::string base = path_basename(path);
    auto dot = base.rfind('.');
    return dot == std::string::npos ? "" : base.substr(dot);
}

// ---------------------------------------------------------------------------
// Python reference adapter: line/indentation based. Tolerant by design;
// anything it cannot interpret is simply not a symbol or reference.

struct Scope {
    int indent = 0;
    NodeKind kind = NodeKind::function;
    std::string qualified;
    int symbol_index = -1;
};

int indent_of(const std::string& line) {
    int n = 0;
    for (char c : line) {
        if (c == ' ') ++n;
        else if (c == '\t') n += 4;
        else break;
    }
    return n;
}

// Removes comments and string bodies; tracks triple-quote state across lines.
std::string scrub_line(const std::string& line, std::string& triple) {
    std::string out;
    size_t i = 0;
    while (i < line.size()) {
        if (!triple.empty()) {
            auto pos = line.find(triple, i);
            if (pos == std::string::npos) return out;
            i = pos + 3;
            triple.clear();
            continue;
        }
        char c = line[i];
        if (c == '"' || c == '\'') {
            std::string three(3, c);
            if (line.compare(i, 3, three) == 0) {
                auto close = line.find(three, i + 3);
                if (close == std::string::npos) {
                    triple = three;
                    return out;
                }
                i = close + 3;
                continue;
            }
            size_t j = i + 1;
            while (j < line.size() && line[j] != c) {
                if (line[j] == '\\') ++j;
                ++j;
            }
            i = j < line.size() ? j + 1 : line.size();
            continue;
        }
        if (c == '#') return out;
        out += c;
        ++i;
    }
    return out;
}

void record_call_refs(const std::string& code, int line_no, int ctx, FileRecord& rec) {
    static const std::regex call_re(R"(([A-Za-z_][A-Za-z0-9_.]*)\s*\()");
    auto begin = std::sregex_iterator(code.begin(), code.end(), call_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        std::string name = (*it)[1].str();
        std::string head = split_dotted(name).front();
        if (call_noise_words().count(name) || call_noise_words().count(head)) continue;
        rec.refs.push_back({RawRef::Kind::call, name, {}, ctx, line_no});
    }
}

void parse_import_line(const std::string& code, int line_no, FileRecord& rec) {
    static const std::regex import_re(R"(^import\s+(.+)$)");
    static const std::regex from_re(R"(^from\s+([.A-Za-z0-9_]+)\s+import\s+(.+)$)");
    std::smatch m;
    std::string body = strip(code);
    if (std::regex_match(body, m, import_re)) {
        std::stringstream ss(m[1].str());
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = strip(item);
            if (item.empty()) continue;
            static const std::regex item_re(R"(^([.A-Za-z0-9_]+)(\s+as\s+([A-Za-z_]\w*))?$)");
            std::smatch im;
            if (!std::regex_match(item, im, item_re)) continue;
            RawRef ref{RawRef::Kind::import_module, im[1].str(), {}, -1, line_no};
            if (im[3].matched) ref.names.push_back(im[3].str());
            rec.refs.push_back(std::move(ref));
        }
        return;
    }
    if (std::regex_match(body, m, from_re)) {
        RawRef ref{RawRef::Kind::import_from, m[1].str(), {}, -1, line_no};
        std::string rest = m[2].str();
        // strip optional parentheses around the name list
        rest.erase(std::remove_if(rest.begin(), rest.end(),
                                  [](char c) { return c == '(' || c == ')'; }),
                   rest.end());
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = strip(item);
            if (item.empty()) continue;
            static const std::regex item_re(R"(^(\*|[A-Za-z_]\w*)(\s+as\s+([A-Za-z_]\w*))?$)");
            std::smatch im;
            if (!std::regex_match(item, im, item_re)) continue;
            if (im[1].str() == "*") continue; // star imports carry no binding
            std::string entry = im[1].str();
            if (im[3].matched) entry += "|" + im[3].str();
            ref.names.push_back(std::move(entry));
        }
        rec.refs.push_back(std::move(ref));
    }
}

void parse_python(const std::string& content, FileRecord& rec) {
    static const std::regex def_re(R"(^(async\s+)?def\s+([A-Za-z_]\w*)\s*\()");
    static const std::regex class_re(R"(^class\s+([A-Za-z_]\w*)\s*(\(([^)]*)\))?\s*:)");

    std::vector<Scope> scopes;
    std::string triple;
    int line_no = 0;
    int last_code_line = 0;

    auto close_scopes = [&](int indent) {
        while (!scopes.empty() && scopes.back().indent >= indent) {
            Scope& s = scopes.back();
            if (s.symbol_index >= 0)
                rec.symbols[static_cast<size_t>(s.symbol_index)].span.end = last_code_line;
            scopes.pop_back();
        }
    };
    auto innermost_ctx = [&]() { return scopes.empty() ? -1 : scopes.back().symbol_index; };
    auto qualify = [&](const std::string& name) {
        return scopes.empty() ? name : scopes.back().qualified + "." + name;
    };

    std::stringstream ss(content);
    std::string raw;
    while (std::getline(ss, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        bool was_in_triple = !triple.empty();
        std::string code = scrub_line(raw, triple);
        if (strip(code).empty()) continue;
        if (was_in_triple) {
            // remainder after a docstring closes; ignore for structure
            last_code_line = line_no;
            continue;
        }
        int indent = indent_of(raw);
        close_scopes(indent);
        std::string body = strip(code);

        std::smatch m;
        if (std::regex_search(body, m, def_re) && m.position(0) == 0) {
            std::string name = m[2].str();
            std::string qualified = qualify(name);
            std::string parent_class;
            if (!scopes.empty() && scopes.back().kind == NodeKind::class_)
                parent_class = scopes.back().qualified;
            rec.symbols.push_back({qualified, NodeKind::function,
                                   Span{line_no, line_no}, body, parent_class});
            int sym = static_cast<int>(rec.symbols.size()) - 1;
            // default-argument expressions may call things
            std::string tail = body.substr(static_cast<size_t>(m.position(0)) + m.length(0));
            record_call_refs(tail, line_no, sym, rec);
            scopes.push_back({indent, NodeKind::function, qualified, sym});
            last_code_line = line_no;
            continue;
        }
        if (std::regex_search(body, m, class_re) && m.position(0) == 0) {
            std::string name = m[1].str();
            std::string qualified = qualify(name);
            std::string parent_class;
            if (!scopes.empty() && scopes.back().kind == NodeKind::class_)
                parent_class = scopes.back().qualified;
            rec.symbols.push_back({qualified, NodeKind::class_,
                                   Span{line_no, line_no}, body, parent_class});
            int sym = static_cast<int>(rec.symbols.size()) - 1;
            if (m[3].matched) {
                std::stringstream bases(m[3].str());
                std::string base;
                while (std::getline(bases, base, ',')) {
                    base = strip(base);
                    if (base.empty() || base == "object") continue;
                    if (base.find('=') != std::string::npos) continue; // metaclass=... kwargs
                    static const std::regex name_re(R"(^[A-Za-z_][A-Za-z0-9_.]*$)");
                    if (!std::regex_match(base, name_re)) continue;
                    rec.refs.push_back({RawRef::Kind::inherit, base, {}, sym, line_no});
                }
            }
            scopes.push_back({indent, NodeKind::class_, qualified, sym});
            last_code_line = line_no;
            continue;
        }
        if (body.rfind("import ", 0) == 0 || body.rfind("from ", 0) == 0) {
            parse_import_line(body, line_no, rec);
            last_code_line = line_no;
            continue;
        }
        record_call_refs(body, line_no, innermost_ctx(), rec);
        last_code_line = line_no;
    }
    close_scopes(0);
}

// Degraded fallback: import-like lines only, whole-file span, no symbols.
void parse_regex_imports(const std::string& content, FileRecord& rec) {
    static const std::regex py_import(R"(^\s*import\s+([A-Za-z_][\w.]*))");
    static const std::regex py_from(R"(^\s*from\s+([.A-Za-z0-9_]+)\s+import\b)");
    static const std::regex c_include(R"(^\s*#\s*include\s*\"([^\"]+)\")");
    std::stringstream ss(content);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::smatch m;
        if (std::regex_search(line, m, py_import))
            rec.refs.push_back({RawRef::Kind::import_module, m[1].str(), {}, -1, line_no});
        else if (std::regex_search(line, m, py_from))
            rec.refs.push_back({RawRef::Kind::import_from, m[1].str(), {}, -1, line_no});
        else if (std::regex_search(line, m, c_include))
            rec.refs.push_back({RawRef::Kind::import_module, m[1].str(), {}, -1, line_no});
    }
}

void collect_mentions(const std::string& content, FileRecord& rec) {
    static const std::regex token_re(R"([A-Za-z_][A-Za-z0-9_./]*)");
    std::set<std::string> tokens;
    auto begin = std::sregex_iterator(content.begin(), content.end(), token_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        std::string tok = it->str();
        while (!tok.empty() && (tok.back() == '.' || tok.back() == '/')) tok.pop_back();
        if (tok.size() > 1) tokens.insert(tok);
    }
    rec.mentions.assign(tokens.begin(), tokens.end());
}

const std::set<std::string>& regex_adapter_extensions() {
    static const std::set<std::string> exts = {".pyi", ".pyx", ".js",  ".jsx", ".ts", ".tsx",
                                               ".go",  ".c",   ".h",   ".cc",  ".cpp", ".hpp",
                                               ".rs",  ".java", ".rb", ".sh"};
    return exts;
}

const std::set<std::string>& doc_extensions() {
    static const std::set<std::string> exts = {".md", ".rst"};
    return exts;
}

const std::set<std::string>& config_extensions() {
    static const std::set<std::string> exts = {".toml", ".yaml", ".yml", ".ini", ".json", ".cfg"};
    return exts;
}

} // namespace

const std::vector<LanguageAdapter>& builtin_adapters() {
    static const std::vector<LanguageAdapter> adapters = {
        {"python", {".py"}, {true, true, true, true}, parse_python},
        {"regex",
         std::vector<std::string>(regex_adapter_extensions().begin(),
                                  regex_adapter_extensions().end()),
         {false, true, false, false},
         parse_regex_imports},
    };
    return adapters;
}

bool is_test_path(const std::string& path) {
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (cur == "tests") return true;
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string base = path_basename(path);
    if (base.rfind("test_", 0) == 0) return true;
    auto dot = base.find('.');
    std::string stem = dot == std::string::npos ? base : base.substr(0, dot);
    if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, "_test") == 0) return true;
    return false;
}

std::string module_path_of(const std::string& path) {
    if (extension_of(path) != ".py") return "";
    std::string noext = path.substr(0, path.size() - 3);
    std::string module;
    for (char c : noext) module += c == '/' ? '.' : c;
    const std::string init_suffix = ".__init__";
    if (module == "__init__") return "";
    if (module.size() > init_suffix.size() &&
        module.compare(module.size() - init_suffix.size(), init_suffix.size(), init_suffix) == 0)
        module = module.substr(0, module.size() - init_suffix.size());
    return module;
}

FileRecord parse_file(const std::string& rel_path, const std::string& content,
                      const IndexConfig& cfg) {
    FileRecord rec;
    rec.path = rel_path;
    rec.is_test = is_test_path(rel_path);
    std::string ext = extension_of(rel_path);
    auto enabled = [&](const std::string& id) {
        return std::find(cfg.adapters.begin(), cfg.adapters.end(), id) != cfg.adapters.end();
    };

    if (ext == ".py" && enabled("python")) {
        rec.adapter = "python";
        rec.module = module_path_of(rel_path);
        try {
            parse_python(content, rec);
        } catch (const std::exception&) {
            rec.parse_failed = true;
            rec.symbols.clear();
            rec.refs.clear();
            parse_regex_imports(content, rec);
        }
        return rec;
    }
    if ((regex_adapter_extensions().count(ext) || ext == ".py") && enabled("regex")) {
        rec.adapter = "regex";
        if (ext == ".py") rec.module = module_path_of(rel_path);
        parse_regex_imports(content, rec);
        return rec;
    }
    if (doc_extensions().count(ext)) {
        rec.adapter = "doc";
        rec.is_doc = true;
        collect_mentions(content, rec);
        return rec;
    }
    if (config_extensions().count(ext) && rel_path.find('/') == std::string::npos) {
        rec.adapter = "config";
        rec.is_config = true;
        collect_mentions(content, rec);
        return rec;
    }
    return rec; // no adapter: bare file node
}

void SymbolTable::add_record(const FileRecord& rec) {
    file_paths.insert(rec.path);
    file_basename_paths[path_basename(rec.path)].push_back(rec.path);
    if (!rec.module.empty()) {
        module_to_path[rec.module] = rec.path;
        path_to_module[rec.path] = rec.module;
    }
    for (const SymbolDecl& s : rec.symbols) {
        NodeId node = symbol_node(rec, s);
        file_qualified[rec.path][s.qualified_name].push_back(node);
        std::string base = basename_of(s.qualified_name);
        file_basename[rec.path][base].push_back(node);
        global_basename[base].push_back(node);
        if (s.qualified_name.find('.') == std::string::npos && s.qualified_name[0] != '_')
            public_toplevel[s.qualified_name].push_back(node);
    }
}

SymbolTable build_symbol_table(const std::map<std::string, FileRecord>& records) {
    SymbolTable t;
    for (const auto& [_, rec] : records) t.add_record(rec);
    return t;
}

NodeId symbol_node(const FileRecord& rec, const SymbolDecl& decl) {
    return NodeId::symbol(decl.kind, rec.path, decl.qualified_name, decl.span);
}

NodeId ref_context_node(const FileRecord& rec, const RawRef& ref) {
    if (ref.ctx_symbol < 0 || ref.ctx_symbol >= static_cast<int>(rec.symbols.size()))
        return NodeId::file(rec.path);
    return symbol_node(rec, rec.symbols[static_cast<size_t>(ref.ctx_symbol)]);
}

std::vector<std::string> import_candidate_modules(const std::string& importer_module,
                                                  const std::string& text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    auto segs = split_dotted(importer_module);
    std::string package =
        importer_module.empty() ? "" : join_dotted(segs, 0, segs.size() - 1);
    if (text[0] == '.') {
        size_t dots = 0;
        while (dots < text.size() && text[dots] == '.') ++dots;
        std::string rest = text.substr(dots);
        auto pkg_segs = split_dotted(package);
        if (package.empty()) pkg_segs.clear();
        if (dots - 1 > pkg_segs.size()) return out; // relative import escapes the repo
        std::string base = join_dotted(pkg_segs, 0, pkg_segs.size() - (dots - 1));
        if (base.empty()) {
            if (!rest.empty()) out.push_back(rest);
        } else {
            out.push_back(rest.empty() ? base : base + "." + rest);
        }
        return out;
    }
    out.push_back(text);
    if (!package.empty()) out.push_back(package + "." + text);
    return out;
}

std::optional<ImportResolution> resolve_module(const std::string& importer_module,
                                               const std::string& text,
                                               const SymbolTable& symtab) {
    auto candidates = import_candidate_modules(importer_module, text);
    bool relative = !text.empty() && text[0] == '.';
    for (size_t i = 0; i < candidates.size(); ++i) {
        auto it = symtab.module_to_path.find(candidates[i]);
        if (it == symtab.module_to_path.end()) continue;
        // explicit only when the absolute text names the target verbatim
        bool verbatim = !relative && i == 0;
        return ImportResolution{it->second, verbatim ? Provenance::explicit_import
                                                     : Provenance::resolved_import};
    }
    // path-style reference from the regex adapter (e.g. #include "a/b.h")
    if (text.find('/') != std::string::npos || text.find('.') != std::string::npos) {
        if (symtab.file_paths.count(text))
            return ImportResolution{text, Provenance::explicit_import};
        auto it = symtab.file_basename_paths.find(text);
        if (it != symtab.file_basename_paths.end() && it->second.size() == 1)
            return ImportResolution{it->second.front(), Provenance::resolved_import};
    }
    return std::nullopt;
}

Bindings compute_bindings(const FileRecord& rec, const SymbolTable& symtab) {
    Bindings out;
    for (const RawRef& ref : rec.refs) {
        if (ref.kind == RawRef::Kind::import_module) {
            auto res = resolve_module(rec.module, ref.text, symtab);
            if (!res) continue;
            std::string name = ref.names.empty() ? ref.text : ref.names.front();
            out[name] = Binding{res->file_path, ""};
        } else if (ref.kind == RawRef::Kind::import_from) {
            auto res = resolve_module(rec.module, ref.text, symtab);
            if (!res) continue;
            auto mod_it = symtab.path_to_module.find(res->file_path);
            std::string module = mod_it == symtab.path_to_module.end() ? "" : mod_it->second;
            for (const std::string& entry : ref.names) {
                auto bar = entry.find('|');
                std::string name = bar == std::string::npos ? entry : entry.substr(0, bar);
                std::string local = bar == std::string::npos ? entry : entry.substr(bar + 1);
                if (!module.empty()) {
                    auto sub = symtab.module_to_path.find(module + "." + name);
                    if (sub != symtab.module_to_path.end()) {
                        out[local] = Binding{sub->second, ""};
                        continue;
                    }
                }
                out[local] = Binding{res->file_path, name};
            }
        }
    }
    return out;
}

namespace {

// unique symbol among candidates of an acceptable kind, else nothing
std::optional<NodeId> pick_unique(const std::vector<NodeId>* candidates, bool inherit) {
    if (!candidates) return std::nullopt;
    const NodeId* found = nullptr;
    for (const NodeId& n : *candidates) {
        if (inherit && n.kind != NodeKind::class_) continue;
        if (found) return std::nullopt; // ambiguous
        found = &n;
    }
    if (!found) return std::nullopt;
    return *found;
}

const std::vector<NodeId>* lookup(const std::map<std::string, std::vector<NodeId>>& m,
                                  const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

} // namespace

std::optional<ResolveResult> resolve_reference(const RawRef& ref, const FileRecord& rec,
                                               const Bindings& bindings,
                                               const SymbolTable& symtab) {
    bool inherit = ref.kind == RawRef::Kind::inherit;
    auto segs = split_dotted(ref.text);
    auto fq = symtab.file_qualified.find(rec.path);
    const std::map<std::string, std::vector<NodeId>>* qualified =
        fq == symtab.file_qualified.end() ? nullptr : &fq->second;
    auto fb = symtab.file_basename.find(rec.path);
    const std::map<std::string, std::vector<NodeId>>* basenames =
        fb == symtab.file_basename.end() ? nullptr : &fb->second;

    // self./cls. resolve against the enclosing class
    if (segs.size() > 1 && (segs[0] == "self" || segs[0] == "cls")) {
        if (ref.ctx_symbol < 0 || !qualified) return std::nullopt;
        const SymbolDecl& ctx = rec.symbols[static_cast<size_t>(ref.ctx_symbol)];
        std::string cls;
        auto ctx_segs = split_dotted(ctx.qualified_name);
        for (size_t len = ctx_segs.size(); len >= 1; --len) {
            std::string prefix = join_dotted(ctx_segs, 0, len);
            if (auto hit = lookup(*qualified, prefix)) {
                bool is_class = false;
                for (const NodeId& n : *hit)
                    if (n.kind == NodeKind::class_) is_class = true;
                if (is_class) {
                    cls = prefix;
                    break;
                }
            }
        }
        if (cls.empty()) return std::nullopt;
        std::string name = cls + "." + join_dotted(segs, 1, segs.size());
        if (auto hit = pick_unique(lookup(*qualified, name), inherit))
            return ResolveResult{*hit, Provenance::same_file_cooccurrence};
        return std::nullopt;
    }

    // same-file: exact qualified name, then unique basename
    if (qualified) {
        if (auto hit = pick_unique(lookup(*qualified, ref.text), inherit))
            return ResolveResult{*hit, Provenance::same_file_cooccurrence};
    }
    if (segs.size() == 1 && basenames) {
        if (auto hit = pick_unique(lookup(*basenames, ref.text), inherit))
            return ResolveResult{*hit, Provenance::same_file_cooccurrence};
    }

    // import bindings, longest prefix first
    for (size_t len = segs.size(); len >= 1; --len) {
        auto bit = bindings.find(join_dotted(segs, 0, len));
        if (bit == bindings.end()) continue;
        const Binding& b = bit->second;
        std::string rest = join_dotted(segs, len, segs.size());
        std::string name = b.prefix.empty() ? rest
                           : rest.empty()  ? b.prefix
                                           : b.prefix + "." + rest;
        if (name.empty()) return std::nullopt; // bare module reference
        auto tq = symtab.file_qualified.find(b.file_path);
        if (tq == symtab.file_qualified.end()) return std::nullopt;
        if (auto hit = pick_unique(lookup(tq->second, name), inherit)) {
            Provenance p = inherit ? Provenance::inheritance : Provenance::resolved_import;
            return ResolveResult{*hit, p};
        }
        return std::nullopt; // binding matched but no symbol: do not fall to fuzzy
    }

    // fuzzy: unique basename anywhere in the repo
    if (segs.size() == 1) {
        if (auto hit = pick_unique(lookup(symtab.global_basename, ref.text), inherit))
            return ResolveResult{*hit, Provenance::fuzzy_name_match};
    }
    return std::nullopt;
}

LinkResult link_file(const FileRecord& rec, const SymbolTable& symtab) {
    LinkResult out;
    Bindings bindings = compute_bindings(rec, symtab);
    NodeId file_node = NodeId::file(rec.path);
    for (const RawRef& ref : rec.refs) {
        if (ref.kind == RawRef::Kind::import_module || ref.kind == RawRef::Kind::import_from) {
            auto res = resolve_module(rec.module, ref.text, symtab);
            if (!res) {
                ++out.unresolved;
                continue;
            }
            if (res->file_path != rec.path)
                out.edges.push_back(make_edge(file_node, RelationKind::imports,
                                              NodeId::file(res->file_path), res->provenance));
            if (ref.kind == RawRef::Kind::import_from) {
                auto mod_it = symtab.path_to_module.find(res->file_path);
                if (mod_it == symtab.path_to_module.end()) continue;
                for (const std::string& entry : ref.names) {
                    auto bar = entry.find('|');
                    std::string name = bar == std::string::npos ? entry : entry.substr(0, bar);
                    auto sub = symtab.module_to_path.find(mod_it->second + "." + name);
                    if (sub != symtab.module_to_path.end() && sub->second != rec.path)
                        out.edges.push_back(make_edge(file_node, RelationKind::imports,
                                                      NodeId::file(sub->second),
                                                      Provenance::resolved_import));
                }
            }
            continue;
        }
        auto res = resolve_reference(ref, rec, bindings, symtab);
        if (!res) {
            ++out.unresolved;
            continue;
        }
        NodeId src = ref_context_node(rec, ref);
        if (src == res->target) continue; // self reference, e.g. recursion
        RelationKind rel =
            ref.kind == RawRef::Kind::inherit ? RelationKind::inherits : RelationKind::invokes;
        out.edges.push_back(make_edge(std::move(src), rel, res->target, res->provenance));
    }
    return out;
}

std::vector<Edge> link_artifact_file(const FileRecord& rec, const SymbolTable& symtab,
                                     const std::map<std::string, FileRecord>& records) {
    std::vector<Edge> out;
    NodeId self = NodeId::file(rec.path);
    auto emit = [&](const std::string& target_path, RelationKind rel, Provenance prov) {
        if (target_path == rec.path) return;
        out.push_back(make_edge(NodeId::file(target_path), rel, self, prov));
    };

    if (rec.is_test && (rec.adapter == "python" || rec.adapter == "regex")) {
        std::set<std::string> targets;
        for (const RawRef& ref : rec.refs) {
            if (ref.kind != RawRef::Kind::import_module && ref.kind != RawRef::Kind::import_from)
                continue;
            auto res = resolve_module(rec.module, ref.text, symtab);
            if (res) targets.insert(res->file_path);
            if (ref.kind == RawRef::Kind::import_from && res) {
                auto mod_it = symtab.path_to_module.find(res->file_path);
                if (mod_it == symtab.path_to_module.end()) continue;
                for (const std::string& entry : ref.names) {
                    auto bar = entry.find('|');
                    std::string name = bar == std::string::npos ? entry : entry.substr(0, bar);
                    auto sub = symtab.module_to_path.find(mod_it->second + "." + name);
                    if (sub != symtab.module_to_path.end()) targets.insert(sub->second);
                }
            }
        }
        for (const std::string& t : targets) {
            auto it = records.find(t);
            if (it != records.end() && !it->second.is_test)
                emit(t, RelationKind::tested_by, Provenance::test_linkage);
        }
    }

    if (rec.is_doc || rec.is_config) {
        RelationKind rel = rec.is_doc ? RelationKind::documents : RelationKind::configures;
        Provenance prov = rec.is_doc ? Provenance::documentation : Provenance::configuration;
        std::set<std::string> targets;
        for (const std::string& tok : rec.mentions) {
            if (symtab.file_paths.count(tok)) {
                targets.insert(tok);
                continue;
            }
            auto fb = symtab.file_basename_paths.find(tok);
            if (fb != symtab.file_basename_paths.end() && fb->second.size() == 1) {
                targets.insert(fb->second.front());
                continue;
            }
            if (rec.is_config) {
                auto mod = symtab.module_to_path.find(tok);
                if (mod != symtab.module_to_path.end()) targets.insert(mod->second);
            } else {
                auto pub = symtab.public_toplevel.find(tok);
                if (pub != symtab.public_toplevel.end() && pub->second.size() == 1)
                    targets.insert(pub->second.front().path);
            }
        }
        for (const std::string& t : targets) emit(t, rel, prov);
    }
    return out;
}

void materialize_structure(const std::map<std::string, FileRecord>& records,
                           std::vector<NodeId>& nodes, std::vector<Edge>& edges,
                           std::map<NodeId, std::string>& attributes) {
    std::set<std::string> dirs{"."};
    auto parent_dir = [](const std::string& p) {
        auto slash = p.rfind('/');
        return slash == std::string::npos ? std::string(".") : p.substr(0, slash);
    };
    for (const auto& [path, _] : records) {
        std::string dir = parent_dir(path);
        while (dir != ".") {
            dirs.insert(dir);
            dir = parent_dir(dir);
        }
    }
    for (const std::string& d : dirs) {
        NodeId node = NodeId::directory(d);
        attributes[node] = d;
        nodes.push_back(std::move(node));
        if (d != ".")
            edges.push_back(make_edge(NodeId::directory(parent_dir(d)), RelationKind::contains,
                                      NodeId::directory(d), Provenance::structural));
    }
    for (const auto& [path, rec] : records) {
        NodeId file_node = NodeId::file(path);
        attributes[file_node] = path;
        edges.push_back(make_edge(NodeId::directory(parent_dir(path)), RelationKind::contains,
                                  file_node, Provenance::structural));
        nodes.push_back(file_node);

        std::map<std::string, const SymbolDecl*> class_by_name;
        for (const SymbolDecl& s : rec.symbols)
            if (s.kind == NodeKind::class_ && !class_by_name.count(s.qualified_name))
                class_by_name[s.qualified_name] = &s;

        for (const SymbolDecl& s : rec.symbols) {
            NodeId node = symbol_node(rec, s);
            attributes[node] = s.signature;
            NodeId parent = file_node;
            if (!s.parent_class.empty()) {
                auto it = class_by_name.find(s.parent_class);
                if (it != class_by_name.end() && it->second->qualified_name != s.qualified_name)
                    parent = symbol_node(rec, *it->second);
            }
            edges.push_back(make_edge(std::move(parent), RelationKind::contains, node,
                                      Provenance::structural));
            nodes.push_back(std::move(node));
        }
    }
}

std::vector<std::string> scan_worktree(const std::filesystem::path& root,
                                       const IndexConfig& cfg) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root))
        raise(Errc::io_error, "worktree root not readable: " + root.string());

    std::vector<std::string> out;
    auto included = [&](const std::string& rel) {
        if (!cfg.include_globs.empty()) {
            bool any = false;
            for (const auto& g : cfg.include_globs)
                if (glob_match(g, rel)) any = true;
            if (!any) return false;
        }
        for (const auto& g : cfg.exclude_globs)
            if (glob_match(g, rel)) return false;
        if (cfg.drop_tests && is_test_path(rel)) return false;
        return true;
    };

    std::function<void(const fs::path&, const std::string&)> walk =
        [&](const fs::path& dir, const std::string& rel_prefix) {
            std::vector<fs::directory_entry> entries;
            std::error_code ec;
            for (auto it = fs::directory_iterator(dir, ec); !ec && it != fs::directory_iterator();
                 it.increment(ec))
                entries.push_back(*it);
            std::sort(entries.begin(), entries.end(),
                      [](const auto& a, const auto& b) { return a.path() < b.path(); });
            for (const auto& e : entries) {
                std::string name = e.path().filename().string();
                if (name.empty() || name[0] == '.' || name == "__pycache__") continue;
                std::string rel = rel_prefix.empty() ? name : rel_prefix + "/" + name;
                std::error_code tec;
                if (e.is_directory(tec)) {
                    walk(e.path(), rel);
                } else if (e.is_regular_file(tec)) {
                    if (included(rel)) out.push_back(rel);
                }
            }
        };
    walk(root, "");
    std::sort(out.begin(), out.end());
    return out;
}

std::string worktree_snapshot_id(const std::map<std::string, std::string>& file_hashes) {
    std::string blob;
    for (const auto& [path, hash] : file_hashes) {
        blob += path;
        blob += '\0';
        blob += hash;
        blob += '\n';
    }
    return fnv1a64_hex(blob);
}

BuildOutput build_graph(const std::filesystem::path& root, const IndexConfig& cfg,
                        std::string snapshot_id) {
    std::vector<std::string> paths = scan_worktree(root, cfg);

    std::map<std::string, FileRecord> records;
    std::map<std::string, std::string> hashes;
    ExtractionReport report;
    for (const std::string& rel : paths) {
        std::string content;
        try {
            content = read_text_file(root / rel);
        } catch (const Error&) {
            ++report.files_skipped;
            continue;
        }
        FileRecord rec = parse_file(rel, content, cfg);
        if (!rec.adapter.empty() && !rec.parse_failed)
            ++report.files_parsed;
        else
            ++report.files_skipped;
        hashes[rel] = fnv1a64_hex(content);
        records[rel] = std::move(rec);
    }

    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    std::map<NodeId, std::string> attributes;
    materialize_structure(records, nodes, edges, attributes);

    SymbolTable symtab = build_symbol_table(records);
    for (const auto& [_, rec] : records) {
        LinkResult linked = link_file(rec, symtab);
        report.unresolved_references += linked.unresolved;
        for (Edge& e : linked.edges) edges.push_back(std::move(e));
        if (rec.is_test || rec.is_doc || rec.is_config)
            for (Edge& e : link_artifact_file(rec, symtab, records)) edges.push_back(std::move(e));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const Edge& e : edges) ++report.edges_by_provenance[e.provenance];

    if (snapshot_id.empty()) snapshot_id = worktree_snapshot_id(hashes);
    RepoGraph graph(std::move(snapshot_id), std::move(nodes), std::move(edges),
                    std::move(attributes));
    return BuildOutput{std::move(graph), std::move(report), std::move(records),
                       std::move(hashes)};
}

} // namespace repograph
