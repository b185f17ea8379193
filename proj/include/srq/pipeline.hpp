// Command implementations behind the CLI, reusable in-process.
//
// Commands that write trees do so atomically: everything goes to a fresh
// staging directory next to the target, which is swapped in only after
// the whole command succeeded. An error leaves the target untouched.
#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srq/codegen.hpp"
#include "srq/entity.hpp"
#include "srq/hierarchy.hpp"
#include "srq/meta.hpp"
#include "srq/project.hpp"
#include "srq/query.hpp"
#include "srq/resolver.hpp"

namespace srq {

struct BuildConfig {
    std::filesystem::path project_root;
    std::filesystem::path output_dir;           // build/link
    std::vector<std::filesystem::path> meta_inputs;  // link
    std::filesystem::path emit_meta_path;       // emit-meta
    std::string library_name;                   // emit-meta; required with emit_meta_path
    bool json_output = false;
    unsigned threads = 0;  // 0 = auto
};

struct Analysis {
    Project project;
    EntityIndex index;
    TypeHierarchy hierarchy;
};

inline Analysis analyze_project(const std::filesystem::path& root, unsigned threads) {
    Analysis a;
    a.project = load_project(root, threads);
    a.index = build_index(a.project.files);
    a.hierarchy = TypeHierarchy(a.index);
    return a;
}

// Wall-clock milliseconds per build phase; "rewrite" is the in-memory
// splice, "emit" the output tree write.
struct PhaseTimings {
    double parse_ms = 0;
    double index_ms = 0;
    double extract_ms = 0;
    double resolve_ms = 0;
    double rewrite_ms = 0;
    double emit_ms = 0;

    [[nodiscard]] double total_ms() const {
        return parse_ms + index_ms + extract_ms + resolve_ms + rewrite_ms + emit_ms;
    }
};

namespace detail {

class PhaseClock {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Writes `files` under a staging sibling of `target`, then swaps it in.
// The rename pair is the only non-reconstructible step; everything before
// it leaves the target untouched.
inline void commit_tree(const std::filesystem::path& target,
                        const std::map<std::string, std::string>& files) {
    namespace fs = std::filesystem;
    fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
    fs::create_directories(parent);
    std::mt19937_64 rng(std::random_device{}());
    fs::path staging;
    for (int attempt = 0; attempt < 16; ++attempt) {
        fs::path candidate = parent / (".staging-" + std::to_string(rng()));
        if (!fs::exists(candidate)) {
            staging = candidate;
            break;
        }
    }
    if (staging.empty()) throw BuildError(ErrorCode::IoError, "cannot create staging directory");
    try {
        fs::create_directories(staging);
        for (const auto& [rel, content] : files) {
            fs::path dest = staging / fs::path(rel);
            if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
            write_file(dest, content);
        }
        fs::path graveyard;
        if (fs::exists(target)) {
            graveyard = parent / (staging.filename().string() + ".old");
            fs::rename(target, graveyard);
        }
        fs::rename(staging, target);
        if (!graveyard.empty()) fs::remove_all(graveyard);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
}

}  // namespace detail

struct BuildOutcome {
    std::size_t sites = 0;          // call sites rewritten
    std::size_t files_changed = 0;  // files containing at least one site
    PhaseTimings timings;
};

// Parse, index, extract, resolve, splice, emit. Used by `build` and, with
// link inputs, by `link`.
inline BuildOutcome cmd_build(const BuildConfig& config) {
    detail::PhaseClock clock;
    PhaseTimings t;
    Project project = load_project(config.project_root, config.threads);
    t.parse_ms = clock.lap();
    EntityIndex index = build_index(project.files);
    TypeHierarchy hierarchy(index);
    t.index_ms = clock.lap();
    std::vector<Query> queries = extract_queries(project.files, index);
    t.extract_ms = clock.lap();
    std::vector<ResolvedResult> results = resolve_all(index, hierarchy, queries);
    t.resolve_ms = clock.lap();
    std::map<std::string, std::string> rewritten = rewrite_project(project.files, queries, results);
    t.rewrite_ms = clock.lap();
    detail::commit_tree(config.output_dir, rewritten);
    t.emit_ms = clock.lap();

    BuildOutcome outcome;
    outcome.sites = queries.size();
    std::set<std::string> touched;
    for (const Query& q : queries) touched.insert(q.site.file);
    outcome.files_changed = touched.size();
    outcome.timings = t;
    return outcome;
}

struct EmitMetaOutcome {
    ReflektMeta meta;
    std::string bytes;
};

inline EmitMetaOutcome cmd_emit_meta(const BuildConfig& config) {
    if (config.library_name.empty())
        throw BuildError(ErrorCode::UsageError, "emit-meta requires --library-name");
    Project project = load_project(config.project_root, config.threads);
    EntityIndex index = build_index(project.files);
    std::vector<Query> queries = extract_queries(project.files, index);
    EmitMetaOutcome out;
    out.meta = make_meta(index, queries, config.library_name);
    out.bytes = save_meta(out.meta);
    std::filesystem::path parent = config.emit_meta_path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    write_file(config.emit_meta_path, out.bytes);
    return out;
}

struct LinkOutcome {
    BuildOutcome build;
    std::size_t library_queries = 0;
    bool impl_written = false;
};

// Loads metas (sorted by library name), resolves the library's queries
// and the downstream project's own queries against the merged index,
// rewrites downstream sources, and writes ReflektImpl.rk when any meta
// was given.
inline LinkOutcome cmd_link(const BuildConfig& config) {
    detail::PhaseClock clock;
    PhaseTimings t;
    std::vector<ReflektMeta> metas(config.meta_inputs.size());
    parallel_for(config.meta_inputs.size(), config.threads, [&](std::size_t i) {
        metas[i] = load_meta(read_file(config.meta_inputs[i]), config.meta_inputs[i].string());
    });
    std::sort(metas.begin(), metas.end(), [](const ReflektMeta& a, const ReflektMeta& b) {
        return a.library_name < b.library_name;
    });
    for (std::size_t i = 1; i < metas.size(); ++i)
        if (metas[i].library_name == metas[i - 1].library_name)
            throw BuildError(ErrorCode::UsageError,
                             "two meta files declare library '" + metas[i].library_name + "'");

    Project project = load_project(config.project_root, config.threads);
    t.parse_ms = clock.lap();
    EntityIndex downstream = build_index(project.files);
    t.index_ms = clock.lap();
    // Downstream chains may name library types, so their arguments resolve
    // against the union of both entity sets (the library plays the part of
    // the classpath here).
    EntityIndex merged = merge_indexes(downstream, metas);
    std::vector<Query> queries = extract_queries(project.files, merged);
    t.extract_ms = clock.lap();
    LinkResolution resolution = link_resolve(downstream, queries, metas);
    t.resolve_ms = clock.lap();
    std::map<std::string, std::string> rewritten =
        rewrite_project(project.files, queries, resolution.downstream_results);
    if (!metas.empty()) rewritten[kImplFileName] = emit_impl_file(resolution.library_results);
    t.rewrite_ms = clock.lap();
    detail::commit_tree(config.output_dir, rewritten);
    t.emit_ms = clock.lap();

    LinkOutcome out;
    out.build.sites = queries.size();
    std::set<std::string> touched;
    for (const Query& q : queries) touched.insert(q.site.file);
    out.build.files_changed = touched.size();
    out.build.timings = t;
    out.library_queries = resolution.library_results.size();
    out.impl_written = !metas.empty();
    return out;
}

// ---- report rendering (stable across runs and thread counts) ----

inline std::string render_index_text(const EntityIndex& index) {
    std::ostringstream out;
    out << "packages (" << index.packages.size() << "):";
    for (const std::string& p : index.packages) out << ' ' << p;
    out << '\n';
    auto dump = [&](const char* label, const std::vector<Entity>& list) {
        out << label << " (" << list.size() << "):\n";
        for (const Entity& e : list) {
            out << "  " << e.fqn;
            if (e.signature) out << ": " << e.signature->to_string();
            if (!e.supertypes.empty()) {
                out << " :";
                for (const std::string& s : e.supertypes) out << ' ' << s;
            }
            if (!e.annotations.empty()) {
                out << " @[";
                for (std::size_t i = 0; i < e.annotations.size(); ++i) {
                    if (i) out << ' ';
                    out << e.annotations[i];
                }
                out << ']';
            }
            if (e.is_companion) out << " companion";
            if (e.is_top_level) out << " top-level";
            out << '\n';
        }
    };
    dump("classes", index.classes);
    dump("objects", index.objects);
    dump("functions", index.functions);
    return std::move(out).str();
}

inline nlohmann::ordered_json entity_report_json(const Entity& e) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(entity_kind_name(e.kind));
    j["fqn"] = e.fqn;
    j["annotations"] = e.annotations;
    j["supertypes"] = e.supertypes;
    if (e.signature) j["signature"] = e.signature->to_string();
    j["isTopLevel"] = e.is_top_level;
    j["isCompanion"] = e.is_companion;
    if (e.enclosing) j["enclosing"] = *e.enclosing;
    j["file"] = e.file;
    return j;
}

inline std::string render_index_json(const EntityIndex& index) {
    nlohmann::ordered_json j;
    j["packages"] = index.packages;
    for (auto [key, list] : std::initializer_list<std::pair<const char*, const std::vector<Entity>*>>{
             {"classes", &index.classes}, {"objects", &index.objects}, {"functions", &index.functions}}) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const Entity& e : *list) arr.push_back(entity_report_json(e));
        j[key] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

inline std::string render_resolution_text(const std::vector<SourceFile>& files,
                                          const std::vector<Query>& queries,
                                          const std::vector<ResolvedResult>& results) {
    std::map<std::string, const std::string*> texts;
    for (const SourceFile& f : files) texts.emplace(f.path, &f.raw_text);
    std::ostringstream out;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const Query& q = queries[i];
        auto text = texts.find(q.site.file);
        LineCol lc = text != texts.end() ? line_col_at(*text->second, q.site.span.begin) : LineCol{};
        out << q.site.file << ':' << lc.line << ':' << lc.column << ": " << query_descriptor(q)
            << "\n  id " << results[i].query_id << ", " << results[i].refs.size() << " match";
        if (results[i].refs.size() != 1) out << "es";
        out << '\n';
        for (const EntityRef& r : results[i].refs)
            out << "    " << entity_kind_name(r.kind) << ' ' << r.fqn << '\n';
    }
    return std::move(out).str();
}

inline std::string render_resolution_json(const std::vector<SourceFile>& files,
                                          const std::vector<Query>& queries,
                                          const std::vector<ResolvedResult>& results) {
    std::map<std::string, const std::string*> texts;
    for (const SourceFile& f : files) texts.emplace(f.path, &f.raw_text);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const Query& q = queries[i];
        nlohmann::ordered_json j;
        auto text = texts.find(q.site.file);
        LineCol lc = text != texts.end() ? line_col_at(*text->second, q.site.span.begin) : LineCol{};
        j["file"] = q.site.file;
        j["line"] = lc.line;
        j["column"] = lc.column;
        j["query"] = query_descriptor(q);
        j["id"] = results[i].query_id;
        nlohmann::ordered_json refs = nlohmann::ordered_json::array();
        for (const EntityRef& r : results[i].refs) {
            nlohmann::ordered_json ref;
            ref["kind"] = std::string(entity_kind_name(r.kind));
            ref["fqn"] = r.fqn;
            refs.push_back(std::move(ref));
        }
        j["refs"] = std::move(refs);
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json top;
    top["queries"] = std::move(arr);
    return top.dump(2) + "\n";
}

}  // namespace srq
