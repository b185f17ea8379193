// Benchmark harness: generated corpora and the two startup strategies.
//
// The baseline models runtime reflection: every simulated application
// start re-scans the project (parse + index) and filters entities for
// each query. The precomputed strategy models the rewritten program: the
// literal result lists already sit in the code, so a start just answers
// the queries from the materialized lists. Materializing them (one build
// plus one load of the rewritten call-site file) is a one-time cost and
// is reported separately; per-start work does not depend on project size.
//
// Trials run strictly sequentially; the first is a warm-up and is
// discarded. Reported numbers are medians with interquartile spread.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srq/pipeline.hpp"

namespace srq {

struct SyntheticSpec {
    std::size_t entity_count = 1000;
    std::size_t query_count = 4;
    double match_fraction = 0.01;  // fraction of entities each query matches
    std::uint64_t seed = 42;
    std::size_t trials = 10;
};

namespace detail {

// Hand-rolled so generated corpora are identical on every platform;
// std::uniform_int_distribution is not portable across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by rejection; bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % bound;
    }

private:
    std::uint64_t state_;
};

// Exactly k distinct values from [0, n), deterministic in seed.
inline std::vector<std::uint32_t> sample_indices(std::size_t n, std::size_t k, SplitMix64& rng) {
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
}

}  // namespace detail

inline constexpr const char* kBenchEntityPackage = "bench.gen";
inline constexpr const char* kBenchQueryPackage = "bench.q";
inline constexpr const char* kBenchDriverFile = "main.rk";
inline constexpr std::size_t kBenchEntitiesPerFile = 100;

// Writes a synthetic project under dir: N annotated functions spread over
// ceil(N/100) files, one annotation class per query, and a driver file
// whose main() contains the query chains. Each query matches exactly
// round(match_fraction * N) entities. Same spec, same bytes.
inline void generate_project(const SyntheticSpec& spec, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const std::size_t n = spec.entity_count;
    const std::size_t m = spec.query_count;
    const auto matches_per_query =
        static_cast<std::size_t>(std::llround(spec.match_fraction * static_cast<double>(n)));

    std::vector<std::vector<std::uint32_t>> annotations_of(n);
    detail::SplitMix64 rng(spec.seed);
    for (std::size_t q = 0; q < m; ++q) {
        detail::SplitMix64 query_rng(rng.next());
        for (std::uint32_t i : detail::sample_indices(n, matches_per_query, query_rng))
            annotations_of[i].push_back(static_cast<std::uint32_t>(q));
    }

    fs::create_directories(dir);
    std::string annotations_file = "package ";
    annotations_file += kBenchQueryPackage;
    annotations_file += "\n\n";
    for (std::size_t q = 0; q < m; ++q)
        annotations_file += "class Q" + std::to_string(q) + "\n";
    write_file(dir / "annotations.rk", annotations_file);

    const std::size_t file_count = (n + kBenchEntitiesPerFile - 1) / kBenchEntitiesPerFile;
    for (std::size_t f = 0; f < file_count; ++f) {
        std::string text = "package ";
        text += kBenchEntityPackage;
        text += "\n\n";
        std::size_t begin = f * kBenchEntitiesPerFile;
        std::size_t end = std::min(n, begin + kBenchEntitiesPerFile);
        for (std::size_t i = begin; i < end; ++i) {
            for (std::uint32_t q : annotations_of[i]) {
                text += "@";
                text += kBenchQueryPackage;
                text += ".Q" + std::to_string(q) + "\n";
            }
            // A little body ballast so parse cost resembles real sources.
            text += "fun e" + std::to_string(i) + "(): Unit { trace(\"e" + std::to_string(i) +
                    "\"); acc = acc + " + std::to_string(i % 97) + " }\n";
        }
        write_file(dir / ("gen_" + std::to_string(f) + ".rk"), text);
    }

    std::string driver = "package bench.app\n\nfun main(): Unit {\n";
    for (std::size_t q = 0; q < m; ++q) {
        driver += "  Reflekt.functions().withAnnotations<";
        driver += kBenchQueryPackage;
        driver += ".Q" + std::to_string(q) + ">().toList()\n";
    }
    driver += "}\n";
    write_file(dir / kBenchDriverFile, driver);
}

struct TrialStats {
    double median_ms = 0;
    double iqr_ms = 0;  // interquartile spread of the kept trials
    std::vector<double> samples_ms;
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    double rank = p * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(rank);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = rank - static_cast<double>(lo);
    return v[lo] + (v[hi] - v[lo]) * frac;
}

inline TrialStats summarize(std::vector<double> samples) {
    TrialStats s;
    s.median_ms = percentile(samples, 0.5);
    s.iqr_ms = percentile(samples, 0.75) - percentile(samples, 0.25);
    s.samples_ms = std::move(samples);
    return s;
}

using bench_clock = std::chrono::steady_clock;

inline double ms_since(bench_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(bench_clock::now() - start).count();
}

}  // namespace detail

struct BaselineRun {
    TrialStats startup;  // parse + index + filter, end to end
    TrialStats scan;     // parse + index portion
    TrialStats filter;   // query answering portion
    std::vector<ResolvedResult> results;
};

// One simulated start per trial: re-read the project from disk, rebuild
// the index, answer every query.
inline BaselineRun run_baseline(const std::filesystem::path& dir, const std::vector<Query>& queries,
                                const SyntheticSpec& spec, unsigned threads) {
    BaselineRun run;
    std::vector<double> total, scan, filter;
    for (std::size_t trial = 0; trial < spec.trials + 1; ++trial) {
        auto t0 = detail::bench_clock::now();
        Project project = load_project(dir, threads);
        EntityIndex index = build_index(project.files);
        TypeHierarchy hierarchy(index);
        double scan_ms = detail::ms_since(t0);
        auto t1 = detail::bench_clock::now();
        std::vector<ResolvedResult> results = resolve_all(index, hierarchy, queries);
        double filter_ms = detail::ms_since(t1);
        if (trial == 0) {  // warm-up: populates caches, result kept for equality checks
            run.results = std::move(results);
            continue;
        }
        scan.push_back(scan_ms);
        filter.push_back(filter_ms);
        total.push_back(scan_ms + filter_ms);
    }
    run.startup = detail::summarize(std::move(total));
    run.scan = detail::summarize(std::move(scan));
    run.filter = detail::summarize(std::move(filter));
    return run;
}

namespace detail {

// Reads the literal lists out of a rewritten driver file, in source
// order. `listOf(...)`/`setOf(...)` with class/object/function reference
// syntax is exactly what the rewriter emits.
inline std::vector<std::vector<EntityRef>> evaluate_literal_lists(const SourceFile& file) {
    std::vector<std::vector<EntityRef>> lists;
    for (const Declaration& d : file.decls) {
        if (d.kind != DeclKind::Function) continue;
        const std::vector<Token>& body = d.body;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i].kind != TokenKind::Ident) continue;
            if (body[i].text != "listOf" && body[i].text != "setOf") continue;
            if (i + 1 >= body.size() || body[i + 1].kind != TokenKind::LParen) continue;
            std::vector<EntityRef> refs;
            std::size_t p = i + 2;
            while (p < body.size() && body[p].kind != TokenKind::RParen) {
                EntityRef ref;
                if (body[p].kind == TokenKind::ColonColon) {
                    ref.kind = EntityKind::Function;
                    ++p;
                }
                std::string fqn;
                while (p < body.size() &&
                       (body[p].kind == TokenKind::Ident || body[p].kind == TokenKind::Dot)) {
                    fqn += body[p].text;
                    ++p;
                }
                if (p < body.size() && body[p].kind == TokenKind::ColonColon) {
                    ref.kind = EntityKind::Class;
                    p += 2;  // skip '::' and the trailing 'class'
                } else if (ref.kind != EntityKind::Function) {
                    ref.kind = EntityKind::Object;
                }
                ref.fqn = std::move(fqn);
                refs.push_back(std::move(ref));
                if (p < body.size() && body[p].kind == TokenKind::Comma) ++p;
            }
            lists.push_back(std::move(refs));
            i = p;
        }
    }
    return lists;
}

}  // namespace detail

struct PrecomputedRun {
    TrialStats startup;       // answering every query from materialized lists
    PhaseTimings build;       // one-time: the full build of the project
    double load_ms = 0;       // one-time: reading the rewritten call-site file
    std::vector<std::vector<EntityRef>> lists;  // in driver source order
};

// Builds the project once (the compile-time cost), loads the literal
// lists from the rewritten driver, then times query answering per start.
inline PrecomputedRun run_precomputed(const std::filesystem::path& dir,
                                      const std::filesystem::path& scratch,
                                      const SyntheticSpec& spec, unsigned threads) {
    PrecomputedRun run;
    BuildConfig config;
    config.project_root = dir;
    config.output_dir = scratch / "out";
    config.threads = threads;
    BuildOutcome outcome = cmd_build(config);
    run.build = outcome.timings;

    auto t0 = detail::bench_clock::now();
    std::filesystem::path driver = config.output_dir / kBenchDriverFile;
    SourceFile rewritten = parse_file(kBenchDriverFile, read_file(driver));
    run.lists = detail::evaluate_literal_lists(rewritten);
    run.load_ms = detail::ms_since(t0);

    // One answering pass is a handful of nanoseconds, far below clock
    // resolution, so each trial averages over many passes.
    constexpr std::size_t kPassesPerTrial = 4096;
    std::vector<double> samples;
    volatile std::size_t sink = 0;  // keeps the answer reads observable
    for (std::size_t trial = 0; trial < spec.trials + 1; ++trial) {
        auto t1 = detail::bench_clock::now();
        std::size_t acc = 0;
        for (std::size_t pass = 0; pass < kPassesPerTrial; ++pass) {
            for (const std::vector<EntityRef>& list : run.lists) {
                acc += list.size();
                if (!list.empty()) acc += static_cast<unsigned char>(list.front().fqn[0]) +
                                          static_cast<unsigned char>(list.back().fqn[0]);
            }
        }
        double ms = detail::ms_since(t1) / kPassesPerTrial;
        sink = sink + acc;
        if (trial == 0) continue;
        samples.push_back(ms);
    }
    run.startup = detail::summarize(std::move(samples));
    return run;
}

struct BenchRow {
    std::size_t entities = 0;
    BaselineRun baseline;
    PrecomputedRun precomputed;
};

struct BenchReport {
    SyntheticSpec spec;  // entity_count ignored; rows carry their own N
    std::vector<BenchRow> rows;
};

// Generates, measures, and cross-checks one corpus size. Both strategies
// must produce identical result lists; a mismatch is an internal fault.
inline BenchRow bench_one_size(SyntheticSpec spec, std::size_t entities,
                               const std::filesystem::path& scratch, unsigned threads) {
    namespace fs = std::filesystem;
    spec.entity_count = entities;
    fs::path dir = scratch / ("corpus-" + std::to_string(entities));
    generate_project(spec, dir);

    Analysis analysis = analyze_project(dir, threads);
    std::vector<Query> queries = extract_queries(analysis.project.files, analysis.index);

    BenchRow row;
    row.entities = entities;
    row.baseline = run_baseline(dir, queries, spec, threads);
    row.precomputed = run_precomputed(dir, scratch / ("build-" + std::to_string(entities)), spec, threads);

    if (row.baseline.results.size() != row.precomputed.lists.size())
        throw InternalError("benchmark equivalence: query count mismatch");
    for (std::size_t i = 0; i < row.baseline.results.size(); ++i)
        if (row.baseline.results[i].refs != row.precomputed.lists[i])
            throw InternalError("benchmark equivalence: strategies disagree on query " +
                                std::to_string(i));
    return row;
}

inline BenchReport run_bench(const SyntheticSpec& spec, const std::vector<std::size_t>& sizes,
                             const std::filesystem::path& scratch, unsigned threads) {
    BenchReport report;
    report.spec = spec;
    for (std::size_t n : sizes) report.rows.push_back(bench_one_size(spec, n, scratch, threads));
    return report;
}

inline std::string render_bench_text(const BenchReport& report) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    out << "queries=" << report.spec.query_count << " matchFraction=" << report.spec.match_fraction
        << " trials=" << report.spec.trials << " seed=" << report.spec.seed << "\n\n";
    out << "baseline (rescan per start):\n";
    out << "  entities    startup-ms      iqr   scan-ms  filter-ms\n";
    for (const BenchRow& row : report.rows) {
        out << "  " << std::setw(8) << row.entities << "  " << std::setw(12)
            << row.baseline.startup.median_ms << "  " << std::setw(7) << row.baseline.startup.iqr_ms
            << "  " << std::setw(8) << row.baseline.scan.median_ms << "  " << std::setw(9)
            << row.baseline.filter.median_ms << "\n";
    }
    out << "\nprecomputed (literal lists in code):\n";
    out << "  entities    startup-ms         iqr  one-time-build-ms  one-time-load-ms\n";
    for (const BenchRow& row : report.rows) {
        out.precision(6);  // per-start cost is sub-microsecond
        out << "  " << std::setw(8) << row.entities << "  " << std::setw(12)
            << row.precomputed.startup.median_ms << "  " << std::setw(10)
            << row.precomputed.startup.iqr_ms;
        out.precision(3);
        out << "  " << std::setw(17) << row.precomputed.build.total_ms() << "  " << std::setw(16)
            << row.precomputed.load_ms << "\n";
    }
    return std::move(out).str();
}

inline std::string render_bench_json(const BenchReport& report) {
    nlohmann::ordered_json j;
    j["queries"] = report.spec.query_count;
    j["matchFraction"] = report.spec.match_fraction;
    j["trials"] = report.spec.trials;
    j["seed"] = report.spec.seed;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const BenchRow& row : report.rows) {
        nlohmann::ordered_json r;
        r["entities"] = row.entities;
        r["baseline"] = {{"startupMedianMs", row.baseline.startup.median_ms},
                         {"startupIqrMs", row.baseline.startup.iqr_ms},
                         {"scanMedianMs", row.baseline.scan.median_ms},
                         {"filterMedianMs", row.baseline.filter.median_ms}};
        r["precomputed"] = {{"startupMedianMs", row.precomputed.startup.median_ms},
                            {"startupIqrMs", row.precomputed.startup.iqr_ms},
                            {"buildMs", row.precomputed.build.total_ms()},
                            {"buildResolveMs", row.precomputed.build.resolve_ms},
                            {"buildRewriteMs", row.precomputed.build.rewrite_ms},
                            {"loadMs", row.precomputed.load_ms}};
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace srq
