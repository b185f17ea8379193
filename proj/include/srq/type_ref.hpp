// Structural type references: nominal names and function types.
//
// A TypeRef is either a (possibly qualified) nominal name or a function
// type (T1, ..., Tn) -> R. The canonical text form printed by to_string
// parses back to an equal value, and is the form used in meta files and
// query identity.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srq/token.hpp"

namespace srq {

class TypeRef {
public:
    TypeRef() = default;

    static TypeRef nominal(std::string fqn) {
        TypeRef t;
        t.fqn_ = std::move(fqn);
        return t;
    }

    static TypeRef function(std::vector<TypeRef> params, TypeRef ret) {
        TypeRef t;
        t.function_ = true;
        t.sub_ = std::move(params);
        t.sub_.push_back(std::move(ret));
        return t;
    }

    [[nodiscard]] bool is_function() const { return function_; }
    [[nodiscard]] bool is_nominal() const { return !function_; }

    // Nominal name; empty for function types.
    [[nodiscard]] const std::string& fqn() const { return fqn_; }

    [[nodiscard]] std::span<const TypeRef> params() const {
        return is_function() ? std::span<const TypeRef>(sub_.data(), sub_.size() - 1)
                             : std::span<const TypeRef>();
    }
    [[nodiscard]] const TypeRef& ret() const { return sub_.back(); }
    [[nodiscard]] std::size_t arity() const { return is_function() ? sub_.size() - 1 : 0; }

    [[nodiscard]] std::string to_string() const {
        if (is_nominal()) return fqn_;
        std::string out = "(";
        auto ps = params();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i) out += ", ";
            out += ps[i].to_string();
        }
        out += ") -> ";
        out += ret().to_string();
        return out;
    }

    // Applies `fn` to every nominal name in the tree, rebuilding the type.
    template <typename Fn>
    [[nodiscard]] TypeRef map_nominals(const Fn& fn) const {
        if (is_nominal()) return nominal(fn(fqn_));
        std::vector<TypeRef> ps;
        ps.reserve(arity());
        for (const TypeRef& p : params()) ps.push_back(p.map_nominals(fn));
        return function(std::move(ps), ret().map_nominals(fn));
    }

    friend bool operator==(const TypeRef& a, const TypeRef& b) {
        return a.function_ == b.function_ && a.fqn_ == b.fqn_ && a.sub_ == b.sub_;
    }

    friend bool operator<(const TypeRef& a, const TypeRef& b) {
        if (a.function_ != b.function_) return !a.function_;
        if (a.fqn_ != b.fqn_) return a.fqn_ < b.fqn_;
        return a.sub_ < b.sub_;
    }

private:
    std::string fqn_;
    std::vector<TypeRef> sub_;  // function types: params followed by return type
    bool function_ = false;
};

inline const std::string kAnyName = "Any";
inline const std::string kUnitName = "Unit";

inline TypeRef any_type() { return TypeRef::nominal(kAnyName); }
inline TypeRef unit_type() { return TypeRef::nominal(kUnitName); }

namespace detail {

// Shared by the source parser and the meta loader; reads one type starting
// at tokens[pos]. Throws via `fail` on malformed input.
template <typename Fail>
TypeRef parse_type_at(const std::vector<Token>& tokens, std::size_t& pos, const Fail& fail) {
    const Token& t = tokens[pos];
    if (t.is(TokenKind::Ident)) {
        std::string name = t.text;
        ++pos;
        while (tokens[pos].is(TokenKind::Dot) && tokens[pos + 1].is(TokenKind::Ident)) {
            name += '.';
            name += tokens[pos + 1].text;
            pos += 2;
        }
        return TypeRef::nominal(std::move(name));
    }
    if (t.is(TokenKind::LParen)) {
        ++pos;
        std::vector<TypeRef> params;
        if (!tokens[pos].is(TokenKind::RParen)) {
            params.push_back(parse_type_at(tokens, pos, fail));
            while (tokens[pos].is(TokenKind::Comma)) {
                ++pos;
                params.push_back(parse_type_at(tokens, pos, fail));
            }
        }
        if (!tokens[pos].is(TokenKind::RParen)) fail(pos, "expected ')' in function type");
        ++pos;
        if (!tokens[pos].is(TokenKind::Arrow)) fail(pos, "expected '->' in function type");
        ++pos;
        TypeRef ret = parse_type_at(tokens, pos, fail);
        return TypeRef::function(std::move(params), std::move(ret));
    }
    fail(pos, "expected a type");
    return {};  // unreachable
}

}  // namespace detail

// Parses a standalone canonical type string, e.g. "(p.C, Int) -> Unit".
// Returns nullopt when the text is not exactly one well-formed type.
inline std::optional<TypeRef> parse_type_string(std::string_view text) {
    std::vector<Token> tokens;
    try {
        tokens = lex(text, "<type>");
    } catch (const BuildError&) {
        return std::nullopt;
    }
    std::size_t pos = 0;
    bool bad = false;
    auto fail = [&](std::size_t, const std::string&) {
        bad = true;
        throw BuildError(ErrorCode::SyntaxError, "malformed type");
    };
    try {
        TypeRef t = detail::parse_type_at(tokens, pos, fail);
        if (bad || !tokens[pos].is(TokenKind::Eof)) return std::nullopt;
        return t;
    } catch (const BuildError&) {
        return std::nullopt;
    }
}

}  // namespace srq
