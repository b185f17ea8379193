// Nominal supertype hierarchy and structural subtyping.
//
// The hierarchy is the directed graph of declared supertypes. It must be
// acyclic; construction fails with CyclicHierarchy otherwise. Undeclared
// nominal types (including Unit) have Any as their only supertype.
//
// super_closure(t) is the set of strict transitive supertypes of t: it
// always contains Any, never t itself, and super_closure(Any) is empty.
//
// is_subtype_of(s, t) holds when
//   - s and t are equal,
//   - t is Any,
//   - both are nominal and t is in super_closure(s),
//   - both are function types of equal arity with contravariant parameter
//     types and a covariant return type.
// Function types relate to nominal types only through Any, and function
// types of different arity never relate.
#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "srq/diag.hpp"
#include "srq/entity.hpp"
#include "srq/type_ref.hpp"

namespace srq {

class TypeHierarchy {
public:
    TypeHierarchy() { closures_.emplace(kAnyName, std::set<std::string>{}); }

    // Builds from every class/object in the index; detects cycles eagerly
    // so lookups afterwards are pure and thread-safe.
    explicit TypeHierarchy(const EntityIndex& index) {
        for (const std::vector<Entity>* list : {&index.classes, &index.objects})
            for (const Entity& e : *list) direct_[e.fqn] = e.supertypes;
        check_acyclic();
        closures_.emplace(kAnyName, std::set<std::string>{});
        for (const auto& [fqn, _] : direct_) compute_closure(fqn);
    }

    [[nodiscard]] const std::set<std::string>& super_closure(const std::string& fqn) const {
        auto it = closures_.find(fqn);
        if (it != closures_.end()) return it->second;
        static const std::set<std::string> kJustAny{kAnyName};
        return kJustAny;  // undeclared nominal: direct subtype of Any
    }

    [[nodiscard]] bool is_subtype_of(const TypeRef& s, const TypeRef& t) const {
        if (s == t) return true;
        if (t.is_nominal() && t.fqn() == kAnyName) return true;
        if (s.is_nominal() && t.is_nominal()) return super_closure(s.fqn()).contains(t.fqn());
        if (s.is_function() && t.is_function() && s.arity() == t.arity()) {
            auto sp = s.params();
            auto tp = t.params();
            for (std::size_t i = 0; i < sp.size(); ++i)
                if (!is_subtype_of(tp[i], sp[i])) return false;
            return is_subtype_of(s.ret(), t.ret());
        }
        return false;
    }

    [[nodiscard]] const std::map<std::string, std::vector<std::string>>& direct_supertypes() const {
        return direct_;
    }

private:
    void check_acyclic() const {
        std::map<std::string, int> state;  // 0 new, 1 in progress, 2 done
        std::vector<std::string> path;
        for (const auto& [root, _] : direct_) {
            if (state[root]) continue;
            // Iterative DFS; frames hold the node and the next edge index.
            std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
            state[root] = 1;
            path.push_back(root);
            while (!stack.empty()) {
                auto& [node, next] = stack.back();
                auto it = direct_.find(node);
                const auto& edges = it->second;
                if (next >= edges.size()) {
                    state[node] = 2;
                    path.pop_back();
                    stack.pop_back();
                    continue;
                }
                const std::string& target = edges[next++];
                if (!direct_.contains(target)) continue;  // undeclared: leaf under Any
                int s = state[target];
                if (s == 1) {
                    std::string cycle = target;
                    for (auto p = path.rbegin(); p != path.rend(); ++p) {
                        cycle += " -> " + *p;
                        if (*p == target) break;
                    }
                    throw BuildError(ErrorCode::CyclicHierarchy,
                                     "supertype cycle: " + cycle);
                }
                if (s == 0) {
                    state[target] = 1;
                    path.push_back(target);
                    stack.emplace_back(target, 0);
                }
            }
        }
    }

    const std::set<std::string>& compute_closure(const std::string& fqn) {
        auto found = closures_.find(fqn);
        if (found != closures_.end()) return found->second;
        std::set<std::string> closure{kAnyName};
        auto it = direct_.find(fqn);
        if (it != direct_.end()) {
            for (const std::string& super : it->second) {
                if (super == fqn) continue;  // unreachable once acyclicity holds
                closure.insert(super);
                const std::set<std::string>& above = direct_.contains(super)
                                                         ? compute_closure(super)
                                                         : super_closure(super);
                closure.insert(above.begin(), above.end());
            }
        }
        closure.erase(fqn);
        return closures_.emplace(fqn, std::move(closure)).first->second;
    }

    std::map<std::string, std::vector<std::string>> direct_;
    std::map<std::string, std::set<std::string>> closures_;
};

}  // namespace srq
