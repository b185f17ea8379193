// Project loading: recursive .rk discovery and parallel parsing.
//
// Parallelism never changes observable output: files are assigned to
// fixed slots by their sorted path order and merged in that order, so a
// run with 8 workers is byte-identical to a run with 1.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "srq/diag.hpp"
#include "srq/parser.hpp"

namespace srq {

inline constexpr const char* kSourceExtension = ".rk";
inline constexpr const char* kThreadsEnvVar = "SRQ_THREADS";

// Worker count: request 0 means pick automatically.
inline unsigned effective_threads(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

inline unsigned threads_from_env() {
    const char* raw = std::getenv(kThreadsEnvVar);
    if (!raw || !*raw) return effective_threads(0);
    char* end = nullptr;
    long value = std::strtol(raw, &end, 10);
    if (end == raw || *end != '\0' || value < 0)
        throw BuildError(ErrorCode::UsageError,
                         std::string(kThreadsEnvVar) + " must be a non-negative integer");
    return effective_threads(static_cast<unsigned>(value));
}

// Runs fn(i) for i in [0, n); exceptions surface on the calling thread,
// keeping the first one in index order so failures are deterministic too.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, const Fn& fn) {
    threads = effective_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (threads > n) threads = static_cast<unsigned>(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw BuildError(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BuildError(ErrorCode::IoError, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw BuildError(ErrorCode::IoError, "cannot write " + path.string());
}

struct Project {
    std::filesystem::path root;
    std::vector<SourceFile> files;  // sorted by project-relative path
};

// Finds every .rk file below root. With no source files a build command
// has nothing to act on, which is reported rather than silently ignored.
inline std::vector<std::filesystem::path> find_source_files(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root))
        throw BuildError(ErrorCode::UsageError, "project root " + root.string() + " is not a directory");
    std::vector<fs::path> rel;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != kSourceExtension) continue;
        rel.push_back(fs::relative(entry.path(), root));
    }
    std::vector<std::string> keys;
    keys.reserve(rel.size());
    for (const auto& p : rel) keys.push_back(p.generic_string());
    std::sort(keys.begin(), keys.end());
    std::vector<fs::path> out;
    out.reserve(keys.size());
    for (const std::string& k : keys) out.emplace_back(k);
    if (out.empty())
        throw BuildError(ErrorCode::NoSourceFiles,
                         "no source files: " + root.string() + " contains no *" + kSourceExtension);
    return out;
}

inline Project load_project(const std::filesystem::path& root, unsigned threads) {
    std::vector<std::filesystem::path> files = find_source_files(root);
    Project project;
    project.root = root;
    project.files.resize(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) {
        std::string rel = files[i].generic_string();
        project.files[i] = parse_file(rel, read_file(root / files[i]));
    });
    return project;
}

}  // namespace srq
