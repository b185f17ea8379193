#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "srq/entity.hpp"
#include "srq/hierarchy.hpp"
#include "srq/type_ref.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace srq;

namespace {

EntityIndex make_index(const oracle::Edges& edges) {
    EntityIndex index;
    for (const auto& [fqn, supers] : edges) {
        Entity e;
        e.kind = EntityKind::Class;
        e.fqn = fqn;
        e.supertypes = supers;
        index.classes.push_back(std::move(e));
    }
    for (std::uint32_t i = 0; i < index.classes.size(); ++i)
        index.by_fqn.emplace(index.classes[i].fqn, std::pair{EntityKind::Class, i});
    return index;
}

oracle::Edges random_edges(gen::Rng& rng, std::size_t count) {
    oracle::Edges edges;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) names.push_back("t.T" + std::to_string(i));
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::string> supers;
        for (std::size_t j = 0; j < i; ++j)  // only earlier names: acyclic
            if (rng.chance(0.3)) supers.push_back(names[j]);
        if (rng.chance(0.15)) supers.push_back(kAnyName);
        edges[names[i]] = supers;
    }
    return edges;
}

void add_with_subterms(const TypeRef& t, std::vector<TypeRef>& universe,
                       std::set<std::string>& seen) {
    if (!seen.insert(t.to_string()).second) return;
    universe.push_back(t);
    if (t.is_function()) {
        for (const TypeRef& p : t.params()) add_with_subterms(p, universe, seen);
        add_with_subterms(t.ret(), universe, seen);
    }
}

TypeRef random_type(gen::Rng& rng, const std::vector<std::string>& names, int depth) {
    if (depth > 0 && rng.chance(0.5)) {
        std::vector<TypeRef> params;
        std::size_t arity = rng.below(4);  // 0..3
        for (std::size_t i = 0; i < arity; ++i)
            params.push_back(random_type(rng, names, depth - 1));
        return TypeRef::function(std::move(params), random_type(rng, names, depth - 1));
    }
    if (rng.chance(0.1)) return any_type();
    if (rng.chance(0.1)) return TypeRef::nominal("t.Unknown");  // never declared
    return TypeRef::nominal(names[rng.below(names.size())]);
}

}  // namespace

TEST_CASE("type parsing and canonical printing") {
    CHECK(parse_type_string("p.A")->to_string() == "p.A");
    CHECK(parse_type_string("() -> Unit")->to_string() == "() -> Unit");
    CHECK(parse_type_string("( Int ,Any ) ->Unit")->to_string() == "(Int, Any) -> Unit");
    CHECK(parse_type_string("((Any) -> Int) -> (Int) -> Unit")->to_string() ==
          "((Any) -> Int) -> (Int) -> Unit");
    CHECK_FALSE(parse_type_string("").has_value());
    CHECK_FALSE(parse_type_string("p.").has_value());
    CHECK_FALSE(parse_type_string("() ->").has_value());
    CHECK_FALSE(parse_type_string("p.A extra").has_value());
    CHECK_FALSE(parse_type_string("(Int Unit) -> Any").has_value());
}

TEST_CASE("supertype closure follows declared edges transitively") {
    TypeHierarchy h(make_index({{"A", {"B"}}, {"B", {"C"}}, {"C", {}}}));
    CHECK(h.super_closure("A") == std::set<std::string>{"B", "C", "Any"});
    CHECK(h.super_closure("B") == std::set<std::string>{"C", "Any"});
    CHECK(h.super_closure("C") == std::set<std::string>{"Any"});
    CHECK(h.super_closure("Any").empty());
    CHECK(h.super_closure("X") == std::set<std::string>{"Any"});  // undeclared
}

TEST_CASE("diamond hierarchies close without duplication") {
    TypeHierarchy h(make_index(
        {{"D", {"B", "C"}}, {"B", {"A"}}, {"C", {"A"}}, {"A", {}}}));
    CHECK(h.super_closure("D") == std::set<std::string>{"A", "B", "C", "Any"});
}

TEST_CASE("cycles in the hierarchy are a build error naming the cycle") {
    auto cyclic = [](const oracle::Edges& edges) {
        try {
            TypeHierarchy h(make_index(edges));
        } catch (const BuildError& e) {
            CHECK(e.code() == ErrorCode::CyclicHierarchy);
            return std::string(e.what());
        }
        return std::string();
    };
    std::string msg = cyclic({{"A", {"B"}}, {"B", {"A"}}});
    CHECK(msg.find("A") != std::string::npos);
    CHECK(msg.find("B") != std::string::npos);
    CHECK_FALSE(cyclic({{"A", {"A"}}}).empty());
    CHECK_FALSE(cyclic({{"A", {"B"}}, {"B", {"C"}}, {"C", {"A"}}, {"D", {"A"}}}).empty());
    CHECK(cyclic({{"A", {"B"}}, {"B", {}}}).empty());  // acyclic: no throw
}

TEST_CASE("function subtyping is contravariant in params, covariant in return") {
    TypeHierarchy h;  // empty: Int is an undeclared nominal
    auto sub = [&](const char* s, const char* t) {
        return h.is_subtype_of(*parse_type_string(s), *parse_type_string(t));
    };
    CHECK(sub("() -> Int", "() -> Any"));
    CHECK(sub("(Any) -> Int", "(Int) -> Any"));
    CHECK_FALSE(sub("(Int) -> Int", "(Any) -> Int"));
    CHECK(sub("(Int) -> Unit", "(Int) -> Unit"));       // reflexive
    CHECK(sub("(Int) -> Unit", "Any"));                 // top admits functions
    CHECK_FALSE(sub("(Int) -> Unit", "(Int, Int) -> Unit"));  // arity mismatch
    CHECK_FALSE(sub("Any", "(Int) -> Unit"));
    CHECK_FALSE(sub("Int", "(Int) -> Unit"));           // nominal vs function
    CHECK_FALSE(sub("(Int) -> Unit", "Int"));
    // Contravariance applied twice: the inner param position is covariant
    // again, so Int-accepting-callback each way flips against intuition.
    CHECK(sub("((Int) -> Unit) -> Int", "((Any) -> Unit) -> Int"));
    CHECK_FALSE(sub("((Any) -> Unit) -> Int", "((Int) -> Unit) -> Any"));
}

TEST_CASE("nominal subtyping uses the declared hierarchy") {
    TypeHierarchy h(make_index({{"p.B", {"p.A"}}, {"p.A", {}}, {"p.C", {}}}));
    CHECK(h.is_subtype_of(TypeRef::nominal("p.B"), TypeRef::nominal("p.A")));
    CHECK_FALSE(h.is_subtype_of(TypeRef::nominal("p.A"), TypeRef::nominal("p.B")));
    CHECK_FALSE(h.is_subtype_of(TypeRef::nominal("p.C"), TypeRef::nominal("p.A")));
    CHECK(h.is_subtype_of(TypeRef::nominal("p.C"), any_type()));
    CHECK_FALSE(h.is_subtype_of(any_type(), TypeRef::nominal("p.A")));
    // Signature matching composes it: (p.A) -> p.B accepts a (p.B)-expecting query.
    CHECK(h.is_subtype_of(*parse_type_string("(p.A) -> p.B"), *parse_type_string("(p.B) -> p.A")));
}

TEST_CASE("closure agrees with BFS oracle on random hierarchies") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        gen::Rng rng(seed);
        oracle::Edges edges = random_edges(rng, 1 + rng.below(8));
        TypeHierarchy h(make_index(edges));
        for (const auto& [fqn, unused] : edges) {
            CAPTURE(seed, fqn);
            REQUIRE(h.super_closure(fqn) == oracle::super_closure(edges, fqn));
        }
    }
}

TEST_CASE("subtype relation equals its least-fixpoint construction") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        gen::Rng rng(seed);
        oracle::Edges edges = random_edges(rng, 1 + rng.below(8));
        std::vector<std::string> names;
        for (const auto& [fqn, unused] : edges) names.push_back(fqn);

        std::vector<TypeRef> universe;
        std::set<std::string> seen;
        add_with_subterms(any_type(), universe, seen);
        for (const std::string& n : names) add_with_subterms(TypeRef::nominal(n), universe, seen);
        for (int i = 0; i < 6; ++i) add_with_subterms(random_type(rng, names, 2), universe, seen);

        TypeHierarchy h(make_index(edges));
        oracle::SubtypeFixpoint fix(edges, universe);
        for (const TypeRef& s : universe)
            for (const TypeRef& t : universe) {
                CAPTURE(seed, s.to_string(), t.to_string());
                REQUIRE(h.is_subtype_of(s, t) == fix.is_subtype(s, t));
            }
    }
}

TEST_CASE("subtyping laws: reflexivity, top, transitivity") {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        gen::Rng rng(seed);
        oracle::Edges edges = random_edges(rng, 1 + rng.below(8));
        std::vector<std::string> names;
        for (const auto& [fqn, unused] : edges) names.push_back(fqn);
        std::vector<TypeRef> universe;
        std::set<std::string> seen;
        add_with_subterms(any_type(), universe, seen);
        for (const std::string& n : names) add_with_subterms(TypeRef::nominal(n), universe, seen);
        for (int i = 0; i < 5; ++i) add_with_subterms(random_type(rng, names, 2), universe, seen);

        TypeHierarchy h(make_index(edges));
        for (const TypeRef& x : universe) {
            REQUIRE(h.is_subtype_of(x, x));
            REQUIRE(h.is_subtype_of(x, any_type()));
        }
        for (const TypeRef& x : universe)
            for (const TypeRef& y : universe) {
                if (!h.is_subtype_of(x, y)) continue;
                for (const TypeRef& z : universe) {
                    if (!h.is_subtype_of(y, z)) continue;
                    CAPTURE(seed, x.to_string(), y.to_string(), z.to_string());
                    REQUIRE(h.is_subtype_of(x, z));
                }
            }
    }
}

TEST_CASE("TypeRef equality and ordering are structural") {
    TypeRef f1 = *parse_type_string("(Int) -> Unit");
    TypeRef f2 = TypeRef::function({TypeRef::nominal("Int")}, unit_type());
    CHECK(f1 == f2);
    CHECK_FALSE(f1 == *parse_type_string("(Int) -> Any"));
    CHECK_FALSE(TypeRef::nominal("Unit") == *parse_type_string("() -> Unit"));
    std::set<TypeRef> types{f1, f2, any_type(), TypeRef::nominal("Int")};
    CHECK(types.size() == 3);
}
