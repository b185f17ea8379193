// Query resolution against the entity index.
//
// An entity matches a query when
//   (a) the query's annotations are a subset of the entity's (exact FQNs),
//   (b) for class/object queries, every requested supertype is Any or lies
//       in the entity's supertype closure -- an entity is not its own
//       supertype, so withSupertype<A> does not return A itself,
//   (c) for function queries, the entity's signature is a subtype of the
//       query's signature,
//   (d) the predicate, if any, evaluates to true.
//
// Results are sorted lexicographically by FQN; set-shaped queries are
// additionally deduplicated. Resolution is total: no match means an empty
// result, never an error.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "srq/entity.hpp"
#include "srq/hierarchy.hpp"
#include "srq/predicate.hpp"
#include "srq/query.hpp"

namespace srq {

struct EntityRef {
    EntityKind kind = EntityKind::Class;
    std::string fqn;

    friend bool operator==(const EntityRef&, const EntityRef&) = default;
    friend bool operator<(const EntityRef& a, const EntityRef& b) { return a.fqn < b.fqn; }
};

struct ResolvedResult {
    std::string query_id;
    std::vector<EntityRef> refs;

    friend bool operator==(const ResolvedResult&, const ResolvedResult&) = default;
};

inline bool eval_predicate(const Predicate& p, const Entity& e, const TypeHierarchy& hierarchy) {
    using Op = Predicate::Op;
    switch (p.op) {
        case Op::And:
            return eval_predicate(*p.lhs, e, hierarchy) && eval_predicate(*p.rhs, e, hierarchy);
        case Op::Or:
            return eval_predicate(*p.lhs, e, hierarchy) || eval_predicate(*p.rhs, e, hierarchy);
        case Op::Not: return !eval_predicate(*p.lhs, e, hierarchy);
        case Op::NameCmp:
            return (e.name == p.text) == (p.cmp == CmpOp::Eq);
        case Op::IsTopLevel: return e.is_top_level;
        case Op::IsCompanion: return e.is_companion;  // always false for non-objects
        case Op::ParamCount: {
            // 0 for non-functions; for class members the receiver counts,
            // consistent with the indexed signature.
            long count = e.signature ? static_cast<long>(e.signature->arity()) : 0;
            switch (p.cmp) {
                case CmpOp::Eq: return count == p.number;
                case CmpOp::Ne: return count != p.number;
                case CmpOp::Lt: return count < p.number;
                case CmpOp::Gt: return count > p.number;
                case CmpOp::Le: return count <= p.number;
                case CmpOp::Ge: return count >= p.number;
            }
            return false;
        }
        case Op::HasAnnotation:
            return std::find(e.annotations.begin(), e.annotations.end(), p.text) !=
                   e.annotations.end();
        case Op::HasSupertype:
            return e.kind != EntityKind::Function &&
                   hierarchy.super_closure(e.fqn).contains(p.text);
    }
    return false;
}

inline bool match_entity(const TypeHierarchy& hierarchy, const Entity& e, const Query& q) {
    if (e.kind != q.kind) return false;
    for (const std::string& ann : q.annotations) {
        if (std::find(e.annotations.begin(), e.annotations.end(), ann) == e.annotations.end())
            return false;
    }
    if (q.kind == EntityKind::Function) {
        if (q.signature) {
            if (!e.signature) return false;
            if (!hierarchy.is_subtype_of(*e.signature, *q.signature)) return false;
        }
    } else {
        const std::set<std::string>& closure = hierarchy.super_closure(e.fqn);
        for (const TypeRef& s : q.supertypes) {
            if (s.is_nominal() && s.fqn() == kAnyName) continue;  // Any admits every entity
            if (!s.is_nominal() || !closure.contains(s.fqn())) return false;
        }
    }
    if (q.predicate && !eval_predicate(*q.predicate, e, hierarchy)) return false;
    return true;
}

inline ResolvedResult resolve_query(const EntityIndex& index, const TypeHierarchy& hierarchy,
                                    const Query& q) {
    ResolvedResult result;
    result.query_id = query_id(q);
    for (const Entity& e : index.of_kind(q.kind))
        if (match_entity(hierarchy, e, q)) result.refs.push_back(EntityRef{e.kind, e.fqn});
    std::sort(result.refs.begin(), result.refs.end());
    if (q.shape == ResultShape::Set)
        result.refs.erase(std::unique(result.refs.begin(), result.refs.end()), result.refs.end());
    return result;
}

// One result per query, in query order.
inline std::vector<ResolvedResult> resolve_all(const EntityIndex& index,
                                               const TypeHierarchy& hierarchy,
                                               const std::vector<Query>& queries) {
    std::vector<ResolvedResult> out;
    out.reserve(queries.size());
    for (const Query& q : queries) out.push_back(resolve_query(index, hierarchy, q));
    return out;
}

}  // namespace srq
