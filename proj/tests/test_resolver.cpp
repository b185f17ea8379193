#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "srq/entity.hpp"
#include "srq/hierarchy.hpp"
#include "srq/parser.hpp"
#include "srq/query.hpp"
#include "srq/resolver.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace srq;

namespace {

struct Fixture {
    std::vector<SourceFile> files;
    EntityIndex index;
    TypeHierarchy hierarchy;
    std::vector<Query> queries;
};

Fixture analyze(const std::vector<std::pair<std::string, std::string>>& sources) {
    Fixture f;
    for (const auto& [path, text] : sources) f.files.push_back(parse_file(path, text));
    f.index = build_index(f.files);
    f.hierarchy = TypeHierarchy(f.index);
    f.queries = extract_queries(f.files, f.index);
    return f;
}

std::vector<std::string> fqns(const ResolvedResult& r) {
    std::vector<std::string> out;
    for (const EntityRef& ref : r.refs) out.push_back(ref.fqn);
    return out;
}

}  // namespace

TEST_CASE("class query matches annotated subclass only") {
    Fixture f = analyze({{"main.rk",
                          "package p\n"
                          "class A\nclass C\n"
                          "@C\nclass B1 : A\n"
                          "class B2 : A\n"
                          "fun main() { Reflekt.classes().withSupertype<A>()"
                          ".withAnnotations<C>().toSet() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    REQUIRE(results.size() == 1);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.B1"});
}

TEST_CASE("annotated function matches a signature query") {
    Fixture f = analyze({{"main.rk",
                          "package p\n"
                          "class Scheduled\n"
                          "@Scheduled\nfun tick(): Unit {}\n"
                          "@Scheduled\nfun other(x: Any): Unit {}\n"
                          "fun main() { Reflekt.functions().withSignature<() -> Unit>()"
                          ".withAnnotations<Scheduled>().toList() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    REQUIRE(results.size() == 1);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.tick"});
}

TEST_CASE("supertype matching excludes the type itself") {
    Fixture f = analyze({{"main.rk",
                          "package p\nclass A\nclass B : A\n"
                          "fun main() { Reflekt.classes().withSupertype<A>().toList() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.B"});
}

TEST_CASE("Any as supertype constraint admits every entity of the kind") {
    Fixture f = analyze({{"main.rk",
                          "package p\nclass A\nclass B : A\nobject O\n"
                          "fun main() { Reflekt.classes().withSupertype<Any>().toList() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.A", "p.B"});
}

TEST_CASE("companion predicate finds the nested companion object") {
    Fixture f = analyze({{"main.rk",
                          "package p\n"
                          "class A { companion object K {} }\n"
                          "object Plain\n"
                          "fun main() { SmartReflekt.objects<Any>()"
                          ".filter { it.isCompanion }.resolve() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.A.K"});
}

TEST_CASE("top-level name predicate finds the named function") {
    Fixture f = analyze({{"main.rk",
                          "package p\n"
                          "fun foo(): Unit {}\n"
                          "class H { fun foo(): Unit {} }\n"
                          "fun main() { SmartReflekt.functions<() -> Unit>()"
                          ".filter { it.isTopLevel && it.name == \"foo\" }.resolve() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.foo"});
}

TEST_CASE("member functions carry their receiver in paramCount and matching") {
    Fixture f = analyze({{"main.rk",
                          "package p\n"
                          "class H { fun m(): Unit {} }\n"
                          "fun free(): Unit {}\n"
                          "fun main() { SmartReflekt.functions<() -> Unit>()"
                          ".filter { it.paramCount == 0 }.resolve() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    // p.H.m has signature (p.H) -> Unit: wrong arity for the type argument
    // and paramCount 1, so only the free function matches either way.
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.free", "p.main"});
}

TEST_CASE("queries against an empty index come back empty") {
    EntityIndex index;
    TypeHierarchy hierarchy(index);
    Query q;
    q.kind = EntityKind::Class;
    ResolvedResult r = resolve_query(index, hierarchy, q);
    CHECK(r.refs.empty());
    CHECK(r.query_id == query_id(q));
}

TEST_CASE("unconstrained queries return all entities of the kind, sorted") {
    Fixture f = analyze({{"b.rk", "package b\nobject Z\nobject A\n"},
                         {"main.rk",
                          "package p\nobject M\n"
                          "fun main() { Reflekt.objects().toList() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(fqns(results[0]) == std::vector<std::string>{"b.A", "b.Z", "p.M"});
}

TEST_CASE("predicates see resolved annotations and the full supertype closure") {
    Fixture f = analyze({{"main.rk",
                          "package p\n"
                          "class Tag\nclass Root\nclass Mid : Root\n"
                          "@Tag\nclass Leaf : Mid\n"
                          "fun main() {\n"
                          "  SmartReflekt.classes<Any>().filter { it.hasSupertype(\"p.Root\") }.resolve()\n"
                          "  SmartReflekt.classes<Any>().filter { it.hasAnnotation(\"p.Tag\") }.resolve()\n"
                          "  SmartReflekt.classes<Any>().filter { it.hasSupertype(\"Any\") }.resolve()\n"
                          "}\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    REQUIRE(results.size() == 3);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.Leaf", "p.Mid"});
    CHECK(fqns(results[1]) == std::vector<std::string>{"p.Leaf"});
    CHECK(fqns(results[2]) ==
          std::vector<std::string>{"p.Leaf", "p.Mid", "p.Root", "p.Tag"});
}

TEST_CASE("function queries never match via hasSupertype") {
    Fixture f = analyze({{"main.rk",
                          "package p\nfun g(): Unit {}\n"
                          "fun main() { SmartReflekt.functions<() -> Unit>()"
                          ".filter { it.hasSupertype(\"Any\") }.resolve() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(results[0].refs.empty());
}

TEST_CASE("set shape deduplicates, list keeps the sorted multiplicity") {
    // FQNs are unique per kind, so result lists cannot actually repeat;
    // this pins the sorted order both shapes share.
    Fixture f = analyze({{"main.rk",
                          "package p\nclass B\nclass A\n"
                          "fun main() { Reflekt.classes().toSet() }\n"}});
    auto results = resolve_all(f.index, f.hierarchy, f.queries);
    CHECK(fqns(results[0]) == std::vector<std::string>{"p.A", "p.B"});
}

TEST_CASE("resolution agrees with the brute-force oracle on random projects") {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 250; ++seed) {
        gen::Rng rng(seed);
        gen::GeneratedProject project = gen::gen_project(rng);
        std::vector<SourceFile> files = gen::parse_generated(project);
        EntityIndex index = build_index(files);
        for (const Entity& e : index.functions)
            project.function_signatures.push_back(*e.signature);

        std::vector<Query> queries;
        std::size_t count = 1 + rng.below(6);
        for (std::size_t i = 0; i < count; ++i) queries.push_back(gen::gen_query(rng, project));

        TypeHierarchy hierarchy(index);
        auto got = resolve_all(index, hierarchy, queries);
        auto expected = oracle::resolve(index, queries);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CAPTURE(seed, i, query_descriptor(queries[i]));
            REQUIRE(got[i].query_id == expected[i].query_id);
            REQUIRE(got[i].refs == expected[i].refs);
            checked += 1;
        }
    }
    CHECK(checked > 500);
}
