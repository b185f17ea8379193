// Flattened project view: every declaration as an Entity with a fully
// qualified name, plus lookup maps. The index is a pure function of the
// set of input files; file ordering does not affect it.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srq/ast.hpp"
#include "srq/diag.hpp"
#include "srq/type_ref.hpp"

namespace srq {

enum class EntityKind { Class, Object, Function };

inline std::string_view entity_kind_name(EntityKind k) {
    switch (k) {
        case EntityKind::Class: return "class";
        case EntityKind::Object: return "object";
        case EntityKind::Function: return "function";
    }
    return "entity";
}

inline std::optional<EntityKind> entity_kind_from_name(std::string_view s) {
    if (s == "class") return EntityKind::Class;
    if (s == "object") return EntityKind::Object;
    if (s == "function") return EntityKind::Function;
    return std::nullopt;
}

struct Entity {
    EntityKind kind = EntityKind::Class;
    std::string fqn;
    std::string name;      // simple name, last FQN segment
    std::string package_name;
    std::vector<std::string> annotations;  // resolved FQNs, sorted unique
    std::vector<std::string> supertypes;   // resolved FQNs, declaration order
    std::optional<TypeRef> signature;      // functions; receiver included for class members
    bool is_top_level = false;
    bool is_companion = false;
    std::optional<std::string> enclosing;  // FQN of the enclosing declaration
    std::string file;
    Span span;
};

struct EntityIndex {
    std::vector<Entity> classes;    // sorted by fqn
    std::vector<Entity> objects;    // sorted by fqn
    std::vector<Entity> functions;  // sorted by fqn
    std::map<std::string, std::pair<EntityKind, std::uint32_t>> by_fqn;
    std::vector<std::string> packages;  // sorted unique packages owning declarations

    [[nodiscard]] const Entity* find(const std::string& fqn) const {
        auto it = by_fqn.find(fqn);
        return it == by_fqn.end() ? nullptr : &of_kind(it->second.first)[it->second.second];
    }
    [[nodiscard]] std::size_t size() const {
        return classes.size() + objects.size() + functions.size();
    }
    [[nodiscard]] const std::vector<Entity>& of_kind(EntityKind k) const {
        switch (k) {
            case EntityKind::Class: return classes;
            case EntityKind::Object: return objects;
            default: return functions;
        }
    }
};

// Name resolution, used for query type arguments and annotation references.
// No imports exist; resolution order is
//   1. built-in type names (Any, Unit) resolve to themselves,
//   2. the name taken as already fully qualified,
//   3. the name prefixed with the current package,
//   4. a unique match under any other declared package.
// Anything else is UnresolvedName; several step-4 matches are AmbiguousName.
inline std::string resolve_name(const EntityIndex& index, const std::string& current_package,
                                const std::string& name, const SourceLoc& use_site) {
    if (name == kAnyName || name == kUnitName) return name;
    if (index.by_fqn.contains(name)) return name;
    std::string prefixed = current_package + "." + name;
    if (index.by_fqn.contains(prefixed)) return prefixed;
    std::vector<std::string> candidates;
    for (const std::string& pkg : index.packages) {
        if (pkg == current_package) continue;
        std::string fqn = pkg + "." + name;
        if (index.by_fqn.contains(fqn)) candidates.push_back(fqn);
    }
    if (candidates.size() == 1) return candidates.front();
    if (candidates.size() > 1) {
        std::string msg = "name '" + name + "' is ambiguous; candidates:";
        for (const std::string& c : candidates) msg += " " + c;
        throw BuildError(ErrorCode::AmbiguousName, msg, use_site);
    }
    throw BuildError(ErrorCode::UnresolvedName, "cannot resolve name '" + name + "'", use_site);
}

namespace detail {

// Declaration-side fallback: names that resolve nowhere are taken at face
// value, so undeclared annotation classes and supertypes keep working. A
// simple name gets the current package prefix; a dotted name is kept as
// written. Ambiguity is still an error: a bare cross-package reference
// must be qualified unless it is globally unique.
inline std::string resolve_decl_name(const EntityIndex& index, const std::string& pkg,
                                     const std::string& name, const SourceLoc& site) {
    try {
        return resolve_name(index, pkg, name, site);
    } catch (const BuildError& e) {
        if (e.code() != ErrorCode::UnresolvedName) throw;
        if (name.find('.') != std::string::npos) return name;
        return pkg + "." + name;
    }
}

// Type names inside signatures differ from annotations/supertypes: an
// undeclared name stays exactly as written, with no package prefix, so
// `Int` in one package matches `Int` in another. Annotation and supertype
// references name project declarations, where the package prefix is the
// natural reading; signature types routinely name foreign types.
inline std::string resolve_decl_type_name(const EntityIndex& index, const std::string& pkg,
                                          const std::string& name, const SourceLoc& site) {
    try {
        return resolve_name(index, pkg, name, site);
    } catch (const BuildError& e) {
        if (e.code() != ErrorCode::UnresolvedName) throw;
        return name;
    }
}

struct FlatDecl {
    const Declaration* decl;
    const SourceFile* file;
    std::string fqn;
    std::optional<std::string> enclosing;
    bool enclosing_is_class;
};

inline void flatten(const SourceFile& file, const Declaration& d,
                    const std::optional<std::string>& enclosing, bool enclosing_is_class,
                    std::vector<FlatDecl>& out) {
    std::string prefix = enclosing ? *enclosing : file.package_name;
    FlatDecl flat{&d, &file, prefix + "." + d.name, enclosing, enclosing_is_class};
    out.push_back(flat);
    for (const Declaration& child : d.children)
        flatten(file, child, out.back().fqn, d.kind == DeclKind::Class, out);
}

}  // namespace detail

// Flattens parsed files into the project-wide index. Throws DuplicateFqn
// when two declarations collide, and AmbiguousName when a declaration
// references a bare name that matches several packages.
inline EntityIndex build_index(const std::vector<SourceFile>& files) {
    std::vector<detail::FlatDecl> flats;
    for (const SourceFile& f : files)
        for (const Declaration& d : f.decls) detail::flatten(f, d, std::nullopt, false, flats);

    // Ordering below must not depend on file traversal order.
    std::sort(flats.begin(), flats.end(), [](const detail::FlatDecl& a, const detail::FlatDecl& b) {
        if (a.fqn != b.fqn) return a.fqn < b.fqn;
        if (a.file->path != b.file->path) return a.file->path < b.file->path;
        return a.decl->span.begin < b.decl->span.begin;
    });
    for (std::size_t i = 1; i < flats.size(); ++i) {
        if (flats[i].fqn == flats[i - 1].fqn) {
            const auto& first = flats[i - 1];
            const auto& second = flats[i];
            LineCol a = line_col_at(first.file->raw_text, first.decl->span.begin);
            LineCol b = line_col_at(second.file->raw_text, second.decl->span.begin);
            throw BuildError(ErrorCode::DuplicateFqn,
                             "duplicate declaration of '" + second.fqn + "'; first at " +
                                 first.file->path + ":" + std::to_string(a.line) + ":" +
                                 std::to_string(a.column) + ", second at " + second.file->path +
                                 ":" + std::to_string(b.line) + ":" + std::to_string(b.column),
                             SourceLoc{second.file->path, second.decl->span});
        }
    }

    // Membership-only skeleton so declaration names resolve against the
    // full project before entities are materialized.
    EntityIndex index;
    std::set<std::string> package_set;
    for (const auto& flat : flats) {
        index.by_fqn.emplace(flat.fqn, std::pair{EntityKind::Class, 0u});
        package_set.insert(flat.file->package_name);
    }
    index.packages.assign(package_set.begin(), package_set.end());

    std::vector<Entity> entities;
    entities.reserve(flats.size());
    for (const auto& flat : flats) {
        const Declaration& d = *flat.decl;
        const std::string& pkg = flat.file->package_name;
        SourceLoc site{flat.file->path, d.span};
        Entity e;
        e.kind = d.kind == DeclKind::Class    ? EntityKind::Class
                 : d.kind == DeclKind::Object ? EntityKind::Object
                                              : EntityKind::Function;
        e.fqn = flat.fqn;
        e.name = d.name;
        e.package_name = pkg;
        e.is_top_level = d.is_top_level;
        e.is_companion = d.is_companion;
        e.enclosing = flat.enclosing;
        e.file = flat.file->path;
        e.span = d.span;
        std::set<std::string> anns;
        for (const std::string& a : d.annotations)
            anns.insert(detail::resolve_decl_name(index, pkg, a, site));
        e.annotations.assign(anns.begin(), anns.end());
        if (d.kind == DeclKind::Function) {
            TypeRef sig = d.declared_signature().map_nominals([&](const std::string& n) {
                return detail::resolve_decl_type_name(index, pkg, n, site);
            });
            if (flat.enclosing_is_class) {
                std::vector<TypeRef> params{TypeRef::nominal(*flat.enclosing)};
                for (const TypeRef& p : sig.params()) params.push_back(p);
                sig = TypeRef::function(std::move(params), sig.ret());
            }
            e.signature = std::move(sig);
        } else {
            for (const std::string& s : d.supertypes)
                e.supertypes.push_back(detail::resolve_decl_name(index, pkg, s, site));
        }
        entities.push_back(std::move(e));
    }

    index.by_fqn.clear();
    for (Entity& e : entities) {
        switch (e.kind) {
            case EntityKind::Class: index.classes.push_back(std::move(e)); break;
            case EntityKind::Object: index.objects.push_back(std::move(e)); break;
            case EntityKind::Function: index.functions.push_back(std::move(e)); break;
        }
    }
    for (EntityKind kind : {EntityKind::Class, EntityKind::Object, EntityKind::Function}) {
        const std::vector<Entity>& list = index.of_kind(kind);
        for (std::uint32_t i = 0; i < list.size(); ++i)
            index.by_fqn.emplace(list[i].fqn, std::pair{kind, i});
    }
    return index;
}

}  // namespace srq
