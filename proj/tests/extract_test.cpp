#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "repograph/extract.hpp"
#include "repograph/json_io.hpp"
#include "test_util.hpp"

using namespace repograph;
using repograph::testutil::TempDir;

namespace {

std::vector<Edge> semantic_edges(const RepoGraph& g) {
    std::vector<Edge> out;
    for (const Edge& e : g.edges())
        if (e.is_semantic()) out.push_back(e);
    return out;
}

int count_edges(const RepoGraph& g, RelationKind rel, Provenance prov) {
    int n = 0;
    for (const Edge& e : g.edges())
        if (e.relation == rel && e.provenance == prov) ++n;
    return n;
}

} // namespace

TEST_CASE("reference adapter covers all four capabilities") {
    bool found = false;
    for (const LanguageAdapter& a : builtin_adapters()) {
        if (a.capabilities.symbols && a.capabilities.imports && a.capabilities.invokes &&
            a.capabilities.inherits)
            found = true;
    }
    CHECK(found);
}

TEST_CASE("empty directory builds one directory node and no edges") {
    TempDir tmp("extract_empty");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    REQUIRE(out.graph.nodes().size() == 1);
    CHECK(out.graph.nodes()[0].kind == NodeKind::directory);
    CHECK(out.graph.edges().empty());
    CHECK(out.report.files_visited() == 0);
}

TEST_CASE("sibling import resolves with resolved_import confidence 0.9") {
    TempDir tmp("extract_sibling");
    tmp.write("pkg/a.py", "import b\n");
    tmp.write("pkg/b.py", "def go():\n    return 1\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    REQUIRE(count_edges(out.graph, RelationKind::imports, Provenance::resolved_import) == 1);
    for (const Edge& e : semantic_edges(out.graph)) {
        CHECK(e.src == NodeId::file("pkg/a.py"));
        CHECK(e.dst == NodeId::file("pkg/b.py"));
        CHECK(e.confidence == 0.9);
    }
}

TEST_CASE("absolute dotted import is explicit at 0.95") {
    TempDir tmp("extract_explicit");
    tmp.write("main.py", "import pkg.util\n");
    tmp.write("pkg/util.py", "def u():\n    return 1\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    CHECK(count_edges(out.graph, RelationKind::imports, Provenance::explicit_import) == 1);
}

TEST_CASE("test file produces tested_by on top of the import edge") {
    TempDir tmp("extract_tested");
    tmp.write("a.py", "def frob():\n    return 2\n");
    tmp.write("test_a.py", "import a\n\n\ndef test_frob():\n    a.frob()\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});

    // import edge from the test plus the call edge into frob
    CHECK(count_edges(out.graph, RelationKind::imports, Provenance::explicit_import) == 1);
    CHECK(count_edges(out.graph, RelationKind::invokes, Provenance::resolved_import) == 1);
    // and the pass-2 link: a.py is tested by test_a.py at 0.75
    std::vector<Edge> tested;
    for (const Edge& e : out.graph.edges())
        if (e.relation == RelationKind::tested_by) tested.push_back(e);
    REQUIRE(tested.size() == 1);
    CHECK(tested[0].src == NodeId::file("a.py"));
    CHECK(tested[0].dst == NodeId::file("test_a.py"));
    CHECK(tested[0].confidence == 0.75);
    CHECK(tested[0].provenance == Provenance::test_linkage);
}

TEST_CASE("resolution precedence: same file, then imports, then fuzzy") {
    TempDir tmp("extract_resolution");
    tmp.write("one.py",
              "def helper():\n"
              "    return 1\n\n\n"
              "def caller():\n"
              "    helper()\n");
    tmp.write("two.py", "def lonely():\n    return 2\n");
    tmp.write("three.py",
              "def use():\n"
              "    lonely()\n"); // no import: unique repo-wide basename
    tmp.write("four.py", "def clash():\n    return 0\n");
    tmp.write("five.py", "def clash():\n    return 1\n");
    tmp.write("six.py", "def caller6():\n    clash()\n"); // ambiguous: no edge
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});

    int same_file = 0, fuzzy = 0;
    for (const Edge& e : semantic_edges(out.graph)) {
        if (e.provenance == Provenance::same_file_cooccurrence) {
            ++same_file;
            CHECK(e.src.qualified_name == "caller");
            CHECK(e.dst.qualified_name == "helper");
            CHECK(e.confidence == 1.0);
        }
        if (e.provenance == Provenance::fuzzy_name_match) {
            ++fuzzy;
            CHECK(e.src.qualified_name == "use");
            CHECK(e.dst.qualified_name == "lonely");
            CHECK(e.confidence == 0.5);
        }
        CHECK(e.dst.qualified_name != "clash"); // ambiguity emits nothing
    }
    CHECK(same_file == 1);
    CHECK(fuzzy == 1);
    CHECK(out.report.unresolved_references >= 1);
}

TEST_CASE("nested defs: innermost spans, file-level contains for inner functions") {
    TempDir tmp("extract_nesting");
    tmp.write("mod.py",
              "class Box:\n"
              "    def put(self):\n"
              "        self.audit()\n"
              "    def audit(self):\n"
              "        return True\n\n\n"
              "def outer():\n"
              "    def inner():\n"
              "        return 3\n"
              "    return inner\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    const RepoGraph& g = out.graph;

    auto find_symbol = [&](const std::string& name) {
        for (const NodeId& n : g.symbols_in_file("mod.py"))
            if (n.qualified_name == name) return n;
        FAIL("missing symbol ", name);
        return NodeId{};
    };
    NodeId box = find_symbol("Box");
    NodeId put = find_symbol("Box.put");
    NodeId audit = find_symbol("Box.audit");
    NodeId outer = find_symbol("outer");
    NodeId inner = find_symbol("outer.inner");
    CHECK(box.kind == NodeKind::class_);
    CHECK(put.span.start == 2);
    CHECK(inner.span.start == 9);
    CHECK(inner.span.end == 10);
    CHECK(outer.span.end == 11);

    // methods hang off the class; nested functions hang off the file
    int class_contains = 0, file_contains_inner = 0;
    for (const Edge& e : g.edges()) {
        if (e.relation != RelationKind::contains) continue;
        if (e.src == box && (e.dst == put || e.dst == audit)) ++class_contains;
        if (e.src == NodeId::file("mod.py") && e.dst == inner) ++file_contains_inner;
    }
    CHECK(class_contains == 2);
    CHECK(file_contains_inner == 1);

    // self.audit() resolves inside the class at confidence 1.0
    bool self_call = false;
    for (const Edge& e : semantic_edges(g))
        if (e.relation == RelationKind::invokes && e.src == put && e.dst == audit &&
            e.confidence == 1.0)
            self_call = true;
    CHECK(self_call);
}

TEST_CASE("inheritance through an import binding carries confidence 0.9") {
    TempDir tmp("extract_inherit");
    tmp.write("base.py", "class Base:\n    def tick(self):\n        return 0\n");
    tmp.write("derived.py",
              "from base import Base\n\n\n"
              "class Derived(Base):\n"
              "    def tock(self):\n"
              "        return 1\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    REQUIRE(count_edges(out.graph, RelationKind::inherits, Provenance::inheritance) == 1);
    for (const Edge& e : semantic_edges(out.graph))
        if (e.relation == RelationKind::inherits) {
            CHECK(e.src.qualified_name == "Derived");
            CHECK(e.dst.qualified_name == "Base");
            CHECK(e.confidence == 0.9);
        }
}

TEST_CASE("docs and configs produce cross-artifact edges") {
    TempDir tmp("extract_artifacts");
    tmp.write("pkg/engine.py", "def spin():\n    return 1\n");
    tmp.write("README.md", "# Guide\n\nSee `pkg/engine.py` and call spin for details.\n");
    tmp.write("settings.toml", "[tool]\nmodule = \"pkg.engine\"\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});

    CHECK(count_edges(out.graph, RelationKind::documents, Provenance::documentation) >= 1);
    CHECK(count_edges(out.graph, RelationKind::configures, Provenance::configuration) == 1);
    for (const Edge& e : semantic_edges(out.graph)) {
        if (e.relation == RelationKind::documents) {
            CHECK(e.src == NodeId::file("pkg/engine.py"));
            CHECK(e.dst == NodeId::file("README.md"));
        }
        if (e.relation == RelationKind::configures) {
            CHECK(e.src == NodeId::file("pkg/engine.py"));
            CHECK(e.dst == NodeId::file("settings.toml"));
        }
    }
}

TEST_CASE("unmatched files become bare file nodes") {
    TempDir tmp("extract_bare");
    tmp.write("data.bin", "\x01\x02\x03");
    tmp.write("a.py", "x = 1\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    REQUIRE(out.graph.find_file("data.bin") != nullptr);
    for (const Edge& e : semantic_edges(out.graph)) CHECK(e.src.path != "data.bin");
    CHECK(out.report.files_parsed == 1);
    CHECK(out.report.files_skipped == 1);
}

TEST_CASE("drop_tests removes test files from the walk") {
    TempDir tmp("extract_droptests");
    tmp.write("a.py", "def f():\n    return 1\n");
    tmp.write("test_a.py", "import a\n");
    tmp.write("tests/helper.py", "import a\n");
    IndexConfig cfg;
    cfg.drop_tests = true;
    BuildOutput out = build_graph(tmp.path(), cfg);
    CHECK(out.graph.find_file("a.py") != nullptr);
    CHECK(out.graph.find_file("test_a.py") == nullptr);
    CHECK(out.graph.find_file("tests/helper.py") == nullptr);
}

TEST_CASE("include and exclude globs filter the walk") {
    TempDir tmp("extract_globs");
    tmp.write("src/a.py", "x = 1\n");
    tmp.write("src/b.py", "x = 1\n");
    tmp.write("vendor/c.py", "x = 1\n");
    IndexConfig cfg;
    cfg.exclude_globs = {"vendor/**"};
    BuildOutput out = build_graph(tmp.path(), cfg);
    CHECK(out.graph.find_file("src/a.py") != nullptr);
    CHECK(out.graph.find_file("vendor/c.py") == nullptr);
}

TEST_CASE("determinism: identical worktrees serialize byte-identically") {
    auto populate = [](const TempDir& t) {
        t.write("pkg/a.py", "import b\nfrom pkg import c\n\n\ndef fa():\n    c.fc()\n");
        t.write("pkg/b.py", "def fb():\n    return 1\n");
        t.write("pkg/c.py", "def fc():\n    fb_unique()\n");
        t.write("util.py", "def fb_unique():\n    return 9\n");
        t.write("README.md", "Mentions pkg/a.py here.\n");
    };
    TempDir t1("extract_det1"), t2("extract_det2");
    populate(t1);
    populate(t2);
    BuildOutput o1 = build_graph(t1.path(), IndexConfig{});
    BuildOutput o2 = build_graph(t2.path(), IndexConfig{});
    CHECK(canonical_dump(graph_to_json(o1.graph)) == canonical_dump(graph_to_json(o2.graph)));
}

TEST_CASE("every emitted confidence is a table value") {
    TempDir tmp("extract_tablescan");
    tmp.write("pkg/a.py",
              "import pkg.b\nfrom pkg import c\n\n\nclass A(pkg.b.B):\n"
              "    def go(self):\n        pkg.b.make()\n        c.run()\n        solo()\n");
    tmp.write("pkg/b.py", "class B:\n    def m(self):\n        return 0\n\n\ndef make():\n"
                          "    return B()\n");
    tmp.write("pkg/c.py", "def run():\n    return 1\n");
    tmp.write("solo.py", "def solo():\n    return 2\n");
    tmp.write("test_pkg.py", "import pkg.a\n");
    tmp.write("README.md", "Covers pkg/a.py.\n");
    tmp.write("conf.toml", "target = \"pkg.a\"\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    const std::set<double> table{1.0, 0.95, 0.9, 0.85, 0.75, 0.6, 0.5};
    for (const Edge& e : out.graph.edges()) {
        CHECK(table.count(e.confidence) == 1);
        CHECK(e.confidence == confidence_of(e.provenance));
    }
}

TEST_CASE("every class node has exactly one contains edge from its file") {
    TempDir tmp("extract_classcontains");
    tmp.write("m.py",
              "class A:\n    def f(self):\n        return 1\n\n\n"
              "class B:\n    class Inner:\n        def g(self):\n            return 2\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    for (const NodeId& n : out.graph.nodes()) {
        if (n.kind != NodeKind::class_) continue;
        int from_file = 0, from_class = 0;
        for (const Edge& e : out.graph.edges()) {
            if (e.relation != RelationKind::contains || e.dst != n) continue;
            if (e.src.kind == NodeKind::file) ++from_file;
            if (e.src.kind == NodeKind::class_) ++from_class;
        }
        if (n.qualified_name == "B.Inner") {
            CHECK(from_class == 1);
            CHECK(from_file == 0);
        } else {
            CHECK(from_file == 1);
            CHECK(from_class == 0);
        }
    }
}

TEST_CASE("every non-directory node is contains-reachable from the root") {
    TempDir tmp("extract_reach");
    tmp.write("pkg/sub/deep.py", "class C:\n    def m(self):\n        def n():\n"
                                 "            return 1\n        return n\n");
    tmp.write("top.py", "def t():\n    return 1\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    const RepoGraph& g = out.graph;
    std::set<NodeId> reached{NodeId::directory(".")};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const Edge& e : g.edges())
            if (e.relation == RelationKind::contains && reached.count(e.src) &&
                !reached.count(e.dst)) {
                reached.insert(e.dst);
                grew = true;
            }
    }
    for (const NodeId& n : g.nodes()) CHECK(reached.count(n) == 1);
}

TEST_CASE("docstrings and comments never produce symbols or calls") {
    TempDir tmp("extract_scrub");
    tmp.write("doc.py",
              "\"\"\"Module doc with fake_call() and\n"
              "def fake():\n"
              "continued prose.\n"
              "\"\"\"\n\n\n"
              "def real():\n"
              "    # commented_call()\n"
              "    s = 'quoted_call()'\n"
              "    return s\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    auto symbols = out.graph.symbols_in_file("doc.py");
    REQUIRE(symbols.size() == 1);
    CHECK(symbols[0].qualified_name == "real");
    CHECK(semantic_edges(out.graph).empty());
}

TEST_CASE("regex adapter extracts path-style includes") {
    TempDir tmp("extract_regex");
    tmp.write("main.c", "#include \"lib/core.h\"\nint main(void) { return 0; }\n");
    tmp.write("lib/core.h", "int core(void);\n");
    BuildOutput out = build_graph(tmp.path(), IndexConfig{});
    bool include_found = false;
    for (const Edge& e : semantic_edges(out.graph))
        if (e.relation == RelationKind::imports && e.dst == NodeId::file("lib/core.h"))
            include_found = true;
    CHECK(include_found);
}
