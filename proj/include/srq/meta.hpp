// ReflektMeta files: a library's entities plus its pending core-DSL
// queries, serialized canonically so identical inputs produce identical
// bytes.
//
// Schema (.reflektmeta, UTF-8 JSON with fixed key order):
//   formatVersion   int, currently 1
//   libraryName     string
//   packages        [string], sorted
//   queries         [{kind, supertypes[], signature?, annotations[], shape, id}], sorted by id
//   entities        [{kind, fqn, annotations[], supertypes[], signature?,
//                     isTopLevel, isCompanion}], sorted by fqn
//
// Types are stored in their canonical text form and every name is fully
// qualified. Extended (SmartReflekt) queries cannot be carried: their
// predicates need the final project, so saving one is SmartCallInLibrary.
#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srq/diag.hpp"
#include "srq/entity.hpp"
#include "srq/hierarchy.hpp"
#include "srq/query.hpp"
#include "srq/resolver.hpp"

namespace srq {

inline constexpr int kMetaFormatVersion = 1;
inline constexpr const char* kMetaExtension = ".reflektmeta";

struct ReflektMeta {
    int format_version = kMetaFormatVersion;
    std::string library_name;
    std::vector<std::string> packages;  // sorted
    std::vector<Query> queries;         // core only, sorted by id, sites empty
    std::vector<Entity> entities;       // sorted by fqn
};

inline bool meta_equal(const ReflektMeta& a, const ReflektMeta& b);

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json query_to_json(const Query& q) {
    ordered_json j;
    j["kind"] = std::string(entity_kind_name(q.kind));
    ordered_json supers = ordered_json::array();
    for (const TypeRef& s : q.supertypes) supers.push_back(s.to_string());
    j["supertypes"] = std::move(supers);
    if (q.signature) j["signature"] = q.signature->to_string();
    j["annotations"] = q.annotations;
    j["shape"] = std::string(result_shape_name(q.shape));
    j["id"] = query_id(q);
    return j;
}

inline ordered_json entity_to_json(const Entity& e) {
    ordered_json j;
    j["kind"] = std::string(entity_kind_name(e.kind));
    j["fqn"] = e.fqn;
    j["annotations"] = e.annotations;
    std::vector<std::string> supers = e.supertypes;
    std::sort(supers.begin(), supers.end());
    j["supertypes"] = std::move(supers);
    if (e.signature) j["signature"] = e.signature->to_string();
    j["isTopLevel"] = e.is_top_level;
    j["isCompanion"] = e.is_companion;
    return j;
}

[[noreturn]] inline void corrupt(const std::string& file, const std::string& reason) {
    throw BuildError(ErrorCode::CorruptMeta, "corrupt meta file: " + reason,
                     SourceLoc{file, Span{}});
}

// Longest declared package that prefixes the FQN; entities nested in
// other entities make the plain "drop the last segment" guess wrong.
inline std::string package_of_fqn(const std::string& fqn, const std::vector<std::string>& packages) {
    std::string best;
    for (const std::string& pkg : packages) {
        if (pkg.size() >= fqn.size() || pkg.size() <= best.size()) continue;
        if (fqn.compare(0, pkg.size(), pkg) == 0 && fqn[pkg.size()] == '.') best = pkg;
    }
    if (!best.empty()) return best;
    auto dot = fqn.rfind('.');
    return dot == std::string::npos ? fqn : fqn.substr(0, dot);
}

}  // namespace detail

// Entities and queries of a library, canonically serialized. `queries`
// must carry only core-DSL chains; an extended query aborts with
// SmartCallInLibrary pointing at its call site.
inline ReflektMeta make_meta(const EntityIndex& index, const std::vector<Query>& queries,
                             std::string library_name) {
    for (const Query& q : queries) {
        if (q.is_extended())
            throw BuildError(ErrorCode::SmartCallInLibrary,
                             "SmartReflekt cannot be used in a library: its filter needs the "
                             "final project and cannot be stored in meta",
                             SourceLoc{q.site.file, q.site.span});
    }
    ReflektMeta meta;
    meta.library_name = std::move(library_name);
    meta.packages = index.packages;
    meta.entities.reserve(index.size());
    for (const std::vector<Entity>* list : {&index.classes, &index.objects, &index.functions})
        for (const Entity& e : *list) meta.entities.push_back(e);
    std::sort(meta.entities.begin(), meta.entities.end(),
              [](const Entity& a, const Entity& b) { return a.fqn < b.fqn; });
    meta.queries = queries;
    for (Query& q : meta.queries) q.site = QuerySite{};  // sites are not serialized
    std::sort(meta.queries.begin(), meta.queries.end(),
              [](const Query& a, const Query& b) { return query_id(a) < query_id(b); });
    return meta;
}

inline std::string save_meta(const ReflektMeta& meta) {
    detail::ordered_json j;
    j["formatVersion"] = meta.format_version;
    j["libraryName"] = meta.library_name;
    j["packages"] = meta.packages;
    detail::ordered_json queries = detail::ordered_json::array();
    for (const Query& q : meta.queries) {
        if (q.is_extended())
            throw BuildError(ErrorCode::SmartCallInLibrary,
                             "SmartReflekt cannot be used in a library",
                             SourceLoc{q.site.file, q.site.span});
        queries.push_back(detail::query_to_json(q));
    }
    j["queries"] = std::move(queries);
    detail::ordered_json entities = detail::ordered_json::array();
    for (const Entity& e : meta.entities) entities.push_back(detail::entity_to_json(e));
    j["entities"] = std::move(entities);
    return j.dump(2) + "\n";
}

inline ReflektMeta load_meta(const std::string& text, const std::string& file) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        detail::corrupt(file, e.what());
    }
    if (!j.is_object()) detail::corrupt(file, "top level is not an object");
    for (const char* key : {"formatVersion", "libraryName", "packages", "queries", "entities"})
        if (!j.contains(key)) detail::corrupt(file, std::string("missing field '") + key + "'");

    if (!j["formatVersion"].is_number_integer()) detail::corrupt(file, "formatVersion must be an integer");
    int version = j["formatVersion"].get<int>();
    if (version != kMetaFormatVersion)
        throw BuildError(ErrorCode::VersionMismatch,
                         "meta format version " + std::to_string(version) + " is not supported; expected " +
                             std::to_string(kMetaFormatVersion),
                         SourceLoc{file, Span{}});

    ReflektMeta meta;
    try {
        meta.library_name = j["libraryName"].get<std::string>();
        meta.packages = j["packages"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        detail::corrupt(file, e.what());
    }

    auto parse_type_field = [&](const nlohmann::json& node, const char* what) -> TypeRef {
        if (!node.is_string()) detail::corrupt(file, std::string(what) + " must be a string");
        std::optional<TypeRef> t = parse_type_string(node.get<std::string>());
        if (!t)
            throw BuildError(ErrorCode::UnresolvedTypeInMeta,
                             "cannot reconstruct type from '" + node.get<std::string>() + "'",
                             SourceLoc{file, Span{}});
        return *t;
    };

    if (!j["queries"].is_array()) detail::corrupt(file, "queries must be an array");
    for (const auto& node : j["queries"]) {
        if (!node.is_object()) detail::corrupt(file, "query entries must be objects");
        for (const char* key : {"kind", "supertypes", "annotations", "shape", "id"})
            if (!node.contains(key)) detail::corrupt(file, std::string("query missing field '") + key + "'");
        Query q;
        auto kind = entity_kind_from_name(node["kind"].get<std::string>());
        if (!kind) detail::corrupt(file, "unknown query kind");
        q.kind = *kind;
        for (const auto& s : node["supertypes"]) q.supertypes.push_back(parse_type_field(s, "supertype"));
        std::sort(q.supertypes.begin(), q.supertypes.end());
        if (node.contains("signature")) q.signature = parse_type_field(node["signature"], "signature");
        try {
            q.annotations = node["annotations"].get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            detail::corrupt(file, e.what());
        }
        std::sort(q.annotations.begin(), q.annotations.end());
        std::string shape = node["shape"].get<std::string>();
        if (shape != "list" && shape != "set") detail::corrupt(file, "unknown result shape");
        q.shape = shape == "set" ? ResultShape::Set : ResultShape::List;
        std::string stored_id = node["id"].get<std::string>();
        if (stored_id != query_id(q))
            detail::corrupt(file, "query id '" + stored_id + "' does not match its content");
        meta.queries.push_back(std::move(q));
    }

    if (!j["entities"].is_array()) detail::corrupt(file, "entities must be an array");
    for (const auto& node : j["entities"]) {
        if (!node.is_object()) detail::corrupt(file, "entity entries must be objects");
        for (const char* key : {"kind", "fqn", "annotations", "supertypes", "isTopLevel", "isCompanion"})
            if (!node.contains(key)) detail::corrupt(file, std::string("entity missing field '") + key + "'");
        Entity e;
        auto kind = entity_kind_from_name(node["kind"].get<std::string>());
        if (!kind) detail::corrupt(file, "unknown entity kind");
        e.kind = *kind;
        try {
            e.fqn = node["fqn"].get<std::string>();
            e.annotations = node["annotations"].get<std::vector<std::string>>();
            e.supertypes = node["supertypes"].get<std::vector<std::string>>();
            e.is_top_level = node["isTopLevel"].get<bool>();
            e.is_companion = node["isCompanion"].get<bool>();
        } catch (const nlohmann::json::exception& ex) {
            detail::corrupt(file, ex.what());
        }
        if (e.fqn.find('.') == std::string::npos)
            detail::corrupt(file, "entity fqn '" + e.fqn + "' is not fully qualified");
        if (node.contains("signature")) e.signature = parse_type_field(node["signature"], "signature");
        if (e.kind == EntityKind::Function && !e.signature)
            detail::corrupt(file, "function entity '" + e.fqn + "' has no signature");
        e.name = e.fqn.substr(e.fqn.rfind('.') + 1);
        e.package_name = detail::package_of_fqn(e.fqn, meta.packages);
        e.file = file;
        meta.entities.push_back(std::move(e));
    }
    std::sort(meta.entities.begin(), meta.entities.end(),
              [](const Entity& a, const Entity& b) { return a.fqn < b.fqn; });
    return meta;
}

inline bool meta_equal(const ReflektMeta& a, const ReflektMeta& b) {
    return save_meta(a) == save_meta(b);
}

// Index over downstream entities plus the entities of every meta. Any FQN
// declared twice across those sources is FqnCollision.
inline EntityIndex merge_indexes(const EntityIndex& downstream,
                                 const std::vector<ReflektMeta>& metas) {
    std::vector<Entity> all;
    all.reserve(downstream.size());
    for (const std::vector<Entity>* list : {&downstream.classes, &downstream.objects, &downstream.functions})
        for (const Entity& e : *list) all.push_back(e);
    std::set<std::string> packages(downstream.packages.begin(), downstream.packages.end());
    for (const ReflektMeta& meta : metas) {
        for (const Entity& e : meta.entities) all.push_back(e);
        packages.insert(meta.packages.begin(), meta.packages.end());
    }
    std::sort(all.begin(), all.end(), [](const Entity& a, const Entity& b) {
        if (a.fqn != b.fqn) return a.fqn < b.fqn;
        return a.file < b.file;
    });
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i].fqn == all[i - 1].fqn)
            throw BuildError(ErrorCode::FqnCollision,
                             "'" + all[i].fqn + "' is declared both in " + all[i - 1].file +
                                 " and " + all[i].file);
    }
    EntityIndex merged;
    merged.packages.assign(packages.begin(), packages.end());
    for (Entity& e : all) {
        switch (e.kind) {
            case EntityKind::Class: merged.classes.push_back(std::move(e)); break;
            case EntityKind::Object: merged.objects.push_back(std::move(e)); break;
            case EntityKind::Function: merged.functions.push_back(std::move(e)); break;
        }
    }
    for (EntityKind kind : {EntityKind::Class, EntityKind::Object, EntityKind::Function}) {
        const std::vector<Entity>& list = merged.of_kind(kind);
        for (std::uint32_t i = 0; i < list.size(); ++i)
            merged.by_fqn.emplace(list[i].fqn, std::pair{kind, i});
    }
    return merged;
}

struct LinkResolution {
    EntityIndex merged_index;
    TypeHierarchy hierarchy;
    // Library queries with results, per meta in input order.
    std::vector<std::pair<Query, ResolvedResult>> library_results;
    // Downstream queries with results, in query order.
    std::vector<ResolvedResult> downstream_results;
};

// Resolves a library's stored queries and the downstream project's own
// queries against the union of both entity sets. Metas must already be
// ordered (the pipeline sorts them by library name).
inline LinkResolution link_resolve(const EntityIndex& downstream,
                                   const std::vector<Query>& downstream_queries,
                                   const std::vector<ReflektMeta>& metas) {
    LinkResolution out;
    out.merged_index = merge_indexes(downstream, metas);
    out.hierarchy = TypeHierarchy(out.merged_index);
    for (const ReflektMeta& meta : metas)
        for (const Query& q : meta.queries)
            out.library_results.emplace_back(q, resolve_query(out.merged_index, out.hierarchy, q));
    out.downstream_results = resolve_all(out.merged_index, out.hierarchy, downstream_queries);
    return out;
}

}  // namespace srq
