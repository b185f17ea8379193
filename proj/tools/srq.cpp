// srq: build-time reflection queries for .rk projects.
//
// Exit codes: 0 success, 1 user or source error, 2 internal fault.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srq/bench.hpp"
#include "srq/pipeline.hpp"
#include "srq/version.hpp"

namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string root;
    std::string output;
    std::string meta_out;
    std::string library_name;
    std::vector<std::string> metas;
    bool json = false;
    bool timings = false;

    std::vector<std::size_t> bench_sizes;
    std::size_t bench_queries = 4;
    std::size_t bench_trials = 10;
    double bench_match_fraction = 0.01;
    std::uint64_t bench_seed = 42;
};

// Best effort: diagnostics point into project files; show line/col and a
// caret when the file is still readable.
void print_error(const srq::BuildError& err, const fs::path& root) {
    std::string source;
    if (err.loc()) {
        std::error_code ec;
        fs::path p = root / err.loc()->file;
        if (!fs::exists(p, ec)) p = err.loc()->file;
        if (fs::exists(p, ec) && fs::is_regular_file(p, ec)) {
            try {
                source = srq::read_file(p);
            } catch (const srq::BuildError&) {
                source.clear();
            }
        }
    }
    std::cerr << srq::render_diagnostic(err, source) << "\n";
    if (err.loc() && !source.empty())
        std::cerr << srq::render_caret(source, err.loc()->span) << "\n";
}

void print_timings(const srq::PhaseTimings& t) {
    std::printf(
        "timings: parse %.3fms, index %.3fms, extract %.3fms, resolve %.3fms, "
        "rewrite %.3fms, emit %.3fms, total %.3fms\n",
        t.parse_ms, t.index_ms, t.extract_ms, t.resolve_ms, t.rewrite_ms, t.emit_ms, t.total_ms());
}

fs::path fresh_scratch_dir() {
    std::mt19937_64 rng(std::random_device{}());
    for (int attempt = 0; attempt < 16; ++attempt) {
        fs::path p = fs::temp_directory_path() / ("srq-bench-" + std::to_string(rng()));
        if (!fs::exists(p)) return p;
    }
    throw srq::BuildError(srq::ErrorCode::IoError, "cannot create scratch directory");
}

int run(int argc, char** argv) {
    CLI::App app{std::string(srq::kToolName) + " " + srq::kToolVersion +
                 " - build-time reflection queries for .rk projects"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(srq::kToolName) + " " + srq::kToolVersion);
    app.set_config("--config");

    CliOptions opt;

    CLI::App* analyze = app.add_subcommand("analyze", "parse a project and print its entity index");
    analyze->add_option("root", opt.root, "project directory")->required();
    analyze->add_flag("--json", opt.json, "machine-readable output");

    CLI::App* resolve = app.add_subcommand("resolve", "print every query with its resolved entities");
    resolve->add_option("root", opt.root, "project directory")->required();
    resolve->add_flag("--json", opt.json, "machine-readable output");
    resolve->add_flag("--timings", opt.timings, "also print phase timings");

    CLI::App* build = app.add_subcommand("build", "rewrite query chains into literal result lists");
    build->add_option("root", opt.root, "project directory")->required();
    build->add_option("-o,--out", opt.output, "output directory")->required();
    build->add_flag("--timings", opt.timings, "also print phase timings");

    CLI::App* emit_meta = app.add_subcommand("emit-meta", "write a library's .reflektmeta file");
    emit_meta->add_option("root", opt.root, "library project directory")->required();
    emit_meta->add_option("-o,--out", opt.meta_out, "meta file path")->required();
    emit_meta->add_option("--library-name", opt.library_name, "library name stored in the meta")
        ->required();

    CLI::App* link = app.add_subcommand(
        "link", "resolve a downstream project together with library meta files");
    link->add_option("root", opt.root, "downstream project directory")->required();
    link->add_option("-o,--out", opt.output, "output directory")->required();
    link->add_option("--meta", opt.metas, "library meta file (repeatable)");
    link->add_flag("--timings", opt.timings, "also print phase timings");

    CLI::App* bench = app.add_subcommand("bench", "compare rescan-per-start against precomputed lists");
    bench->add_option("--entities", opt.bench_sizes,
                      "corpus sizes to measure (repeatable; default 100 1000 10000)");
    bench->add_option("--queries", opt.bench_queries, "queries per corpus");
    bench->add_option("--trials", opt.bench_trials, "timed trials per measurement");
    bench->add_option("--match-fraction", opt.bench_match_fraction,
                      "fraction of entities each query matches");
    bench->add_option("--seed", opt.bench_seed, "corpus generator seed");
    bench->add_flag("--json", opt.json, "machine-readable output");

    CLI11_PARSE(app, argc, argv);

    unsigned threads = srq::threads_from_env();

    if (analyze->parsed()) {
        srq::Analysis a = srq::analyze_project(opt.root, threads);
        std::cout << (opt.json ? srq::render_index_json(a.index) : srq::render_index_text(a.index));
        return 0;
    }
    if (resolve->parsed()) {
        srq::detail::PhaseClock clock;
        srq::Analysis a = srq::analyze_project(opt.root, threads);
        std::vector<srq::Query> queries = srq::extract_queries(a.project.files, a.index);
        std::vector<srq::ResolvedResult> results = srq::resolve_all(a.index, a.hierarchy, queries);
        std::cout << (opt.json
                          ? srq::render_resolution_json(a.project.files, queries, results)
                          : srq::render_resolution_text(a.project.files, queries, results));
        if (opt.timings) std::printf("timings: total %.3fms\n", clock.lap());
        return 0;
    }
    if (build->parsed()) {
        srq::BuildConfig config;
        config.project_root = opt.root;
        config.output_dir = opt.output;
        config.threads = threads;
        srq::BuildOutcome outcome = srq::cmd_build(config);
        std::cout << "rewrote " << outcome.sites << " call site" << (outcome.sites == 1 ? "" : "s")
                  << " in " << outcome.files_changed << " file"
                  << (outcome.files_changed == 1 ? "" : "s") << "\n";
        if (opt.timings) print_timings(outcome.timings);
        return 0;
    }
    if (emit_meta->parsed()) {
        srq::BuildConfig config;
        config.project_root = opt.root;
        config.emit_meta_path = opt.meta_out;
        config.library_name = opt.library_name;
        config.threads = threads;
        srq::EmitMetaOutcome outcome = srq::cmd_emit_meta(config);
        std::cout << "wrote meta for library '" << outcome.meta.library_name << "': "
                  << outcome.meta.entities.size() << " entities, " << outcome.meta.queries.size()
                  << " queries\n";
        return 0;
    }
    if (link->parsed()) {
        srq::BuildConfig config;
        config.project_root = opt.root;
        config.output_dir = opt.output;
        for (const std::string& m : opt.metas) config.meta_inputs.emplace_back(m);
        config.threads = threads;
        srq::LinkOutcome outcome = srq::cmd_link(config);
        std::cout << "rewrote " << outcome.build.sites << " call site"
                  << (outcome.build.sites == 1 ? "" : "s") << " in " << outcome.build.files_changed
                  << " file" << (outcome.build.files_changed == 1 ? "" : "s");
        if (outcome.impl_written)
            std::cout << "; " << srq::kImplFileName << " has " << outcome.library_queries
                      << " library quer" << (outcome.library_queries == 1 ? "y" : "ies");
        std::cout << "\n";
        if (opt.timings) print_timings(outcome.build.timings);
        return 0;
    }
    if (bench->parsed()) {
        srq::SyntheticSpec spec;
        spec.query_count = opt.bench_queries;
        spec.trials = opt.bench_trials;
        spec.match_fraction = opt.bench_match_fraction;
        spec.seed = opt.bench_seed;
        std::vector<std::size_t> sizes =
            opt.bench_sizes.empty() ? std::vector<std::size_t>{100, 1000, 10000} : opt.bench_sizes;
        fs::path scratch = fresh_scratch_dir();
        srq::BenchReport report;
        try {
            report = srq::run_bench(spec, sizes, scratch, threads);
        } catch (...) {
            std::error_code ec;
            fs::remove_all(scratch, ec);
            throw;
        }
        std::error_code ec;
        fs::remove_all(scratch, ec);
        std::cout << (opt.json ? srq::render_bench_json(report) : srq::render_bench_text(report));
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const srq::BuildError& err) {
        fs::path root;
        for (int i = 1; i < argc; ++i) {
            std::string arg = argv[i];
            if (!arg.empty() && arg[0] != '-' && fs::is_directory(arg)) {
                root = arg;
                break;
            }
        }
        print_error(err, root);
        return 1;
    } catch (const srq::InternalError& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return 2;
    }
}
