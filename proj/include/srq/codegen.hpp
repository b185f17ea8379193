// Source rewriting: literal result lists in place of query chains, and
// the generated implementation file for library results.
//
// Reference rendering: classes as `fqn::class`, objects as `fqn`,
// functions as `::fqn`. Replacements touch exactly the chain spans;
// everything outside them is preserved byte for byte, so rewriting is
// idempotent (a rewritten project contains no chains to rewrite).
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "srq/ast.hpp"
#include "srq/diag.hpp"
#include "srq/query.hpp"
#include "srq/resolver.hpp"
#include "srq/version.hpp"

namespace srq {

inline std::string render_ref(const EntityRef& ref) {
    switch (ref.kind) {
        case EntityKind::Class: return ref.fqn + "::class";
        case EntityKind::Object: return ref.fqn;
        case EntityKind::Function: return "::" + ref.fqn;
    }
    return ref.fqn;
}

inline std::string emit_literal(const std::vector<EntityRef>& refs, ResultShape shape) {
    std::string out = shape == ResultShape::Set ? "setOf(" : "listOf(";
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i) out += ", ";
        out += render_ref(refs[i]);
    }
    out += ')';
    return out;
}

struct Replacement {
    Span span;
    std::string text;
};

// Applies non-overlapping replacements to one file's text, back to front
// so earlier spans stay valid. Overlap means the extraction pass produced
// garbage, which is an internal fault rather than a user error.
inline std::string apply_replacements(const std::string& text, std::vector<Replacement> reps) {
    std::sort(reps.begin(), reps.end(),
              [](const Replacement& a, const Replacement& b) { return a.span.begin < b.span.begin; });
    for (std::size_t i = 1; i < reps.size(); ++i) {
        if (reps[i].span.begin < reps[i - 1].span.end)
            throw InternalError("OverlappingSpans: replacement spans intersect at offset " +
                                std::to_string(reps[i].span.begin));
    }
    std::string out = text;
    for (auto it = reps.rbegin(); it != reps.rend(); ++it) {
        if (it->span.end > out.size())
            throw InternalError("OverlappingSpans: replacement span exceeds file size");
        out.replace(it->span.begin, it->span.length(), it->text);
    }
    return out;
}

// Rewritten text per file, keyed by project-relative path. Files without
// queries come through unchanged. Results are looked up by query id;
// a query without a result is MissingResult.
inline std::map<std::string, std::string> rewrite_project(
    const std::vector<SourceFile>& files, const std::vector<Query>& queries,
    const std::vector<ResolvedResult>& results) {
    std::map<std::string, const ResolvedResult*> by_id;
    for (const ResolvedResult& r : results) by_id.emplace(r.query_id, &r);

    std::map<std::string, std::vector<Replacement>> per_file;
    for (const Query& q : queries) {
        std::string id = query_id(q);
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw BuildError(ErrorCode::MissingResult, "no resolved result for query " + id,
                             SourceLoc{q.site.file, q.site.span});
        per_file[q.site.file].push_back(Replacement{q.site.span, emit_literal(it->second->refs, q.shape)});
    }

    std::map<std::string, std::string> out;
    for (const SourceFile& f : files) {
        auto it = per_file.find(f.path);
        if (it == per_file.end()) {
            out.emplace(f.path, f.raw_text);
        } else {
            out.emplace(f.path, apply_replacements(f.raw_text, std::move(it->second)));
        }
    }
    return out;
}

inline const char* kImplFileName = "ReflektImpl.rk";
inline const char* kImplPackage = "reflekt.generated";

// One impl function per distinct query id, sorted by id. Queries that
// normalize identically share an id and produce a single entry; an id
// shared by two different queries would be a hash collision and is
// rejected loudly instead of silently merged.
inline std::string emit_impl_file(std::vector<std::pair<Query, ResolvedResult>> entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.second.query_id < b.second.query_id;
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const auto& [qa, ra] = entries[i - 1];
        const auto& [qb, rb] = entries[i];
        if (ra.query_id == rb.query_id && !same_query(qa, qb))
            throw BuildError(ErrorCode::DuplicateQueryId,
                             "query id " + ra.query_id + " is shared by two different queries");
    }
    std::string body;
    std::string last_id;
    for (const auto& [query, result] : entries) {
        if (result.query_id == last_id) continue;  // identical query, one entry per id
        last_id = result.query_id;
        body += "// ";
        body += query_descriptor(query);
        body += "\nfun impl_";
        body += result.query_id;
        body += "(): ";
        body += query.shape == ResultShape::Set ? "Set" : "List";
        body += " { return ";
        body += emit_literal(result.refs, query.shape);
        body += " }\n";
    }
    std::string out = "// generated by ";
    out += kToolName;
    out += ' ';
    out += kToolVersion;
    out += "; content-hash ";
    out += fnv1a_hex(body);
    out += "\npackage ";
    out += kImplPackage;
    out += "\n\n";
    out += body;
    return out;
}

}  // namespace srq
