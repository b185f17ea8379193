// Benchmark harness: deterministic corpus generation, the literal-list
// reader, trial statistics, and agreement between the two strategies.
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "srq/bench.hpp"

#include "support/tmpdir.hpp"

namespace fs = std::filesystem;
using testsup::TmpDir;
using testsup::read_all;

namespace {

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), root).generic_string()] = read_all(entry.path());
    return out;
}

}  // namespace

TEST_CASE("SplitMix64 reproduces the published sequence") {
    // Reference values computed independently from the algorithm
    // definition (first outputs for seeds 0, 42, 1234567).
    srq::detail::SplitMix64 a(0);
    CHECK(a.next() == 0xe220a8397b1dcdafull);
    CHECK(a.next() == 0x6e789e6aa1b965f4ull);
    CHECK(a.next() == 0x06c45d188009454full);

    srq::detail::SplitMix64 b(42);
    CHECK(b.next() == 0xbdd732262feb6e95ull);
    CHECK(b.next() == 0x28efe333b266f103ull);

    srq::detail::SplitMix64 c(1234567);
    CHECK(c.next() == 0x599ed017fb08fc85ull);

    SECTION("below() stays in range and is deterministic") {
        srq::detail::SplitMix64 r1(7), r2(7);
        for (int i = 0; i < 1000; ++i) {
            std::uint64_t v = r1.below(17);
            CHECK(v < 17);
            CHECK(v == r2.below(17));
        }
    }
}

TEST_CASE("sample_indices draws exactly k distinct values") {
    srq::detail::SplitMix64 rng(99);
    auto picks = srq::detail::sample_indices(1000, 10, rng);
    REQUIRE(picks.size() == 10);
    std::set<std::uint32_t> uniq(picks.begin(), picks.end());
    CHECK(uniq.size() == 10);
    for (std::uint32_t v : picks) CHECK(v < 1000);

    SECTION("k = n yields a permutation") {
        srq::detail::SplitMix64 r(5);
        auto all = srq::detail::sample_indices(32, 32, r);
        std::set<std::uint32_t> s(all.begin(), all.end());
        CHECK(s.size() == 32);
    }
    SECTION("k > n clamps to n") {
        srq::detail::SplitMix64 r(5);
        CHECK(srq::detail::sample_indices(4, 100, r).size() == 4);
    }
    SECTION("same seed, same draw") {
        srq::detail::SplitMix64 r1(123), r2(123);
        CHECK(srq::detail::sample_indices(500, 50, r1) == srq::detail::sample_indices(500, 50, r2));
    }
}

TEST_CASE("percentile and summarize") {
    using srq::detail::percentile;
    std::vector<double> v{5, 1, 4, 2, 3};  // unsorted on purpose
    CHECK(percentile(v, 0.5) == 3.0);
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 1.0) == 5.0);
    CHECK(percentile(v, 0.25) == 2.0);
    CHECK(percentile(v, 0.75) == 4.0);
    CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(percentile({}, 0.5) == 0.0);
    CHECK(percentile({7}, 0.5) == 7.0);

    srq::TrialStats s = srq::detail::summarize({5, 1, 4, 2, 3});
    CHECK(s.median_ms == 3.0);
    CHECK(s.iqr_ms == 2.0);
    CHECK(s.samples_ms == std::vector<double>{5, 1, 4, 2, 3});
}

TEST_CASE("generated corpora are identical for identical specs") {
    srq::SyntheticSpec spec;
    spec.entity_count = 130;
    spec.query_count = 3;
    spec.match_fraction = 0.1;
    spec.seed = 7;

    TmpDir tmp("srq-bench-det");
    srq::generate_project(spec, tmp.path() / "a");
    srq::generate_project(spec, tmp.path() / "b");
    CHECK(read_tree(tmp.path() / "a") == read_tree(tmp.path() / "b"));

    spec.seed = 8;
    srq::generate_project(spec, tmp.path() / "c");
    CHECK(read_tree(tmp.path() / "a") != read_tree(tmp.path() / "c"));

    // 130 entities at 100 per file -> 2 entity files + annotations + driver.
    std::map<std::string, std::string> tree = read_tree(tmp.path() / "a");
    CHECK(tree.size() == 4);
    CHECK(tree.count("annotations.rk") == 1);
    CHECK(tree.count("gen_0.rk") == 1);
    CHECK(tree.count("gen_1.rk") == 1);
    CHECK(tree.count("main.rk") == 1);
}

TEST_CASE("each query matches exactly the requested fraction") {
    srq::SyntheticSpec spec;
    spec.entity_count = 100;
    spec.query_count = 3;
    spec.match_fraction = 0.1;
    spec.seed = 42;

    TmpDir tmp("srq-bench-frac");
    srq::generate_project(spec, tmp.path());

    srq::Analysis a = srq::analyze_project(tmp.path(), 1);
    CHECK(a.index.functions.size() == 101);  // 100 entities + driver main

    std::vector<srq::Query> queries = srq::extract_queries(a.project.files, a.index);
    REQUIRE(queries.size() == 3);
    std::vector<srq::ResolvedResult> results = srq::resolve_all(a.index, a.hierarchy, queries);
    for (const auto& r : results) CHECK(r.refs.size() == 10);

    // Count annotations in the index independently of the resolver.
    for (std::size_t q = 0; q < 3; ++q) {
        std::string ann = std::string(srq::kBenchQueryPackage) + ".Q" + std::to_string(q);
        std::size_t carriers = 0;
        for (const auto& f : a.index.functions) {
            auto& anns = f.annotations;
            carriers += std::count(anns.begin(), anns.end(), ann) > 0 ? 1 : 0;
        }
        CHECK(carriers == 10);
    }
}

TEST_CASE("zero entities produce only annotations and driver") {
    srq::SyntheticSpec spec;
    spec.entity_count = 0;
    spec.query_count = 2;

    TmpDir tmp("srq-bench-zero");
    srq::generate_project(spec, tmp.path());
    std::map<std::string, std::string> tree = read_tree(tmp.path());
    CHECK(tree.size() == 2);
    CHECK(tree.count("annotations.rk") == 1);
    CHECK(tree.count("main.rk") == 1);

    srq::Analysis a = srq::analyze_project(tmp.path(), 1);
    std::vector<srq::Query> queries = srq::extract_queries(a.project.files, a.index);
    for (const auto& r : srq::resolve_all(a.index, a.hierarchy, queries)) CHECK(r.refs.empty());
}

TEST_CASE("evaluate_literal_lists reads back rewritten results") {
    SECTION("handcrafted mixed-kind literals") {
        srq::SourceFile f = srq::parse_file("d.rk", R"(package d

fun main(): Unit {
    val a = listOf(p.B::class, p.O, ::p.tick)
    val b = setOf()
    val c = listOf(q.Single)
}
)");
        auto lists = srq::detail::evaluate_literal_lists(f);
        REQUIRE(lists.size() == 3);
        REQUIRE(lists[0].size() == 3);
        CHECK(lists[0][0].kind == srq::EntityKind::Class);
        CHECK(lists[0][0].fqn == "p.B");
        CHECK(lists[0][1].kind == srq::EntityKind::Object);
        CHECK(lists[0][1].fqn == "p.O");
        CHECK(lists[0][2].kind == srq::EntityKind::Function);
        CHECK(lists[0][2].fqn == "p.tick");
        CHECK(lists[1].empty());
        REQUIRE(lists[2].size() == 1);
        CHECK(lists[2][0].kind == srq::EntityKind::Object);
    }

    SECTION("round trip through a real build") {
        srq::SyntheticSpec spec;
        spec.entity_count = 60;
        spec.query_count = 2;
        spec.match_fraction = 0.05;
        TmpDir tmp("srq-bench-rt");
        srq::generate_project(spec, tmp.path() / "src");

        srq::Analysis a = srq::analyze_project(tmp.path() / "src", 1);
        std::vector<srq::Query> queries = srq::extract_queries(a.project.files, a.index);
        std::vector<srq::ResolvedResult> results = srq::resolve_all(a.index, a.hierarchy, queries);

        srq::BuildConfig c;
        c.project_root = tmp.path() / "src";
        c.output_dir = tmp.path() / "out";
        c.threads = 1;
        srq::cmd_build(c);

        srq::SourceFile rewritten = srq::parse_file(
            srq::kBenchDriverFile, read_all(tmp.path() / "out" / srq::kBenchDriverFile));
        auto lists = srq::detail::evaluate_literal_lists(rewritten);
        REQUIRE(lists.size() == results.size());
        for (std::size_t i = 0; i < lists.size(); ++i) REQUIRE(lists[i] == results[i].refs);
    }
}

TEST_CASE("both strategies answer identically on a small corpus") {
    srq::SyntheticSpec spec;
    spec.entity_count = 80;
    spec.query_count = 3;
    spec.match_fraction = 0.1;
    spec.trials = 3;

    TmpDir tmp("srq-bench-run");
    srq::BenchRow row = srq::bench_one_size(spec, spec.entity_count, tmp.path(), 1);

    CHECK(row.entities == 80);
    CHECK(row.baseline.results.size() == 3);
    CHECK(row.baseline.startup.samples_ms.size() == 3);  // warm-up discarded
    CHECK(row.precomputed.startup.samples_ms.size() == 3);
    CHECK(row.precomputed.lists.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(row.precomputed.lists[i].size() == 8);
        CHECK(row.baseline.results[i].refs == row.precomputed.lists[i]);
    }
    CHECK(row.baseline.startup.median_ms > 0.0);
    CHECK(row.precomputed.build.total_ms() > 0.0);
}

TEST_CASE("bench report renders to text and json") {
    srq::SyntheticSpec spec;
    spec.entity_count = 50;
    spec.query_count = 2;
    spec.match_fraction = 0.1;
    spec.trials = 2;

    TmpDir tmp("srq-bench-render");
    srq::BenchReport report = srq::run_bench(spec, {50, 120}, tmp.path(), 1);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].entities == 50);
    CHECK(report.rows[1].entities == 120);

    std::string text = srq::render_bench_text(report);
    CHECK(text.find("baseline (rescan per start):") != std::string::npos);
    CHECK(text.find("precomputed (literal lists in code):") != std::string::npos);
    CHECK(text.find("queries=2") != std::string::npos);

    auto j = nlohmann::json::parse(srq::render_bench_json(report));
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["entities"] == 50);
    CHECK(j["rows"][0]["baseline"]["startupMedianMs"].is_number());
    CHECK(j["rows"][1]["precomputed"]["buildMs"].is_number());
    CHECK(j["trials"] == 2);
}
