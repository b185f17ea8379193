// Filter predicates for extended (SmartReflekt) queries.
//
// The language is closed: `it` is the only binding, atoms are fixed, and
// any other identifier is rejected at parse time with ForeignCapture so a
// condition can never depend on context the resolver does not have.
//
//   pred := or
//   or   := and ("||" and)*
//   and  := un ("&&" un)*
//   un   := "!" un | "(" pred ")" | atom
//   atom := it.name (== | !=) STRING
//         | it.isTopLevel
//         | it.isCompanion
//         | it.paramCount (== | < | > | <= | >=) INT
//         | it.hasAnnotation(STRING)
//         | it.hasSupertype(STRING)
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srq/diag.hpp"
#include "srq/token.hpp"

namespace srq {

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

enum class CmpOp { Eq, Ne, Lt, Gt, Le, Ge };

inline std::string_view cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Gt: return ">";
        case CmpOp::Le: return "<=";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

struct Predicate {
    enum class Op {
        And,
        Or,
        Not,
        NameCmp,        // it.name ==/!= text
        IsTopLevel,
        IsCompanion,
        ParamCount,     // it.paramCount <cmp> number
        HasAnnotation,  // exact FQN in the entity's annotations
        HasSupertype,   // FQN in the entity's supertype closure
    };

    Op op;
    PredicatePtr lhs;  // And/Or/Not
    PredicatePtr rhs;  // And/Or
    std::string text;  // NameCmp/HasAnnotation/HasSupertype operand
    long number = 0;   // ParamCount operand
    CmpOp cmp = CmpOp::Eq;

    static PredicatePtr make_binary(Op op, PredicatePtr a, PredicatePtr b) {
        auto p = std::make_shared<Predicate>();
        p->op = op;
        p->lhs = std::move(a);
        p->rhs = std::move(b);
        return p;
    }
    static PredicatePtr make_not(PredicatePtr a) {
        auto p = std::make_shared<Predicate>();
        p->op = Op::Not;
        p->lhs = std::move(a);
        return p;
    }
    static PredicatePtr make_flag(Op op) {
        auto p = std::make_shared<Predicate>();
        p->op = op;
        return p;
    }
    static PredicatePtr make_text(Op op, CmpOp cmp, std::string value) {
        auto p = std::make_shared<Predicate>();
        p->op = op;
        p->cmp = cmp;
        p->text = std::move(value);
        return p;
    }
    static PredicatePtr make_param_count(CmpOp cmp, long n) {
        auto p = std::make_shared<Predicate>();
        p->op = Op::ParamCount;
        p->cmp = cmp;
        p->number = n;
        return p;
    }
};

namespace detail {

inline std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

// Canonical, re-parseable rendering: binary nodes fully parenthesized, so
// equal predicates print identically regardless of source spelling.
inline std::string print_predicate(const Predicate& p) {
    using Op = Predicate::Op;
    switch (p.op) {
        case Op::And:
            return "(" + print_predicate(*p.lhs) + " && " + print_predicate(*p.rhs) + ")";
        case Op::Or:
            return "(" + print_predicate(*p.lhs) + " || " + print_predicate(*p.rhs) + ")";
        case Op::Not: return "!" + print_predicate(*p.lhs);
        case Op::NameCmp:
            return "it.name " + std::string(cmp_op_text(p.cmp)) + " " + detail::quote_string(p.text);
        case Op::IsTopLevel: return "it.isTopLevel";
        case Op::IsCompanion: return "it.isCompanion";
        case Op::ParamCount:
            return "it.paramCount " + std::string(cmp_op_text(p.cmp)) + " " +
                   std::to_string(p.number);
        case Op::HasAnnotation: return "it.hasAnnotation(" + detail::quote_string(p.text) + ")";
        case Op::HasSupertype: return "it.hasSupertype(" + detail::quote_string(p.text) + ")";
    }
    return "";
}

namespace detail {

class PredicateParser {
public:
    PredicateParser(const std::vector<Token>& tokens, std::string file)
        : tokens_(tokens), file_(std::move(file)) {}

    PredicatePtr run() {
        PredicatePtr p = parse_or();
        if (!at_end()) syntax_error("unexpected trailing tokens in predicate", cur().span);
        return p;
    }

private:
    [[nodiscard]] const Token& cur() const { return tokens_[pos_]; }
    [[nodiscard]] bool at_end() const { return cur().kind == TokenKind::Eof; }

    [[noreturn]] void syntax_error(const std::string& msg, Span span) const {
        throw BuildError(ErrorCode::PredicateSyntaxError, msg, SourceLoc{file_, span});
    }
    [[noreturn]] void foreign(const Token& t) const {
        throw BuildError(ErrorCode::ForeignCapture,
                         "predicate captures foreign identifier '" + t.text +
                             "'; only 'it' and its fixed properties may be used",
                         SourceLoc{file_, t.span});
    }

    PredicatePtr parse_or() {
        PredicatePtr lhs = parse_and();
        while (cur().kind == TokenKind::OrOr) {
            ++pos_;
            lhs = Predicate::make_binary(Predicate::Op::Or, std::move(lhs), parse_and());
        }
        return lhs;
    }

    PredicatePtr parse_and() {
        PredicatePtr lhs = parse_unary();
        while (cur().kind == TokenKind::AndAnd) {
            ++pos_;
            lhs = Predicate::make_binary(Predicate::Op::And, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    PredicatePtr parse_unary() {
        if (cur().kind == TokenKind::Bang) {
            ++pos_;
            return Predicate::make_not(parse_unary());
        }
        if (cur().kind == TokenKind::LParen) {
            ++pos_;
            PredicatePtr inner = parse_or();
            if (cur().kind != TokenKind::RParen)
                syntax_error("expected ')' in predicate", cur().span);
            ++pos_;
            return inner;
        }
        return parse_atom();
    }

    CmpOp parse_cmp(bool ordered) {
        switch (cur().kind) {
            case TokenKind::EqEq: ++pos_; return CmpOp::Eq;
            case TokenKind::NotEq: ++pos_; return CmpOp::Ne;
            case TokenKind::Lt:
                if (ordered) { ++pos_; return CmpOp::Lt; }
                break;
            case TokenKind::Gt:
                if (ordered) { ++pos_; return CmpOp::Gt; }
                break;
            case TokenKind::Le:
                if (ordered) { ++pos_; return CmpOp::Le; }
                break;
            case TokenKind::Ge:
                if (ordered) { ++pos_; return CmpOp::Ge; }
                break;
            default: break;
        }
        syntax_error("expected a comparison operator", cur().span);
    }

    std::string parse_string_operand() {
        if (cur().kind == TokenKind::Ident) foreign(cur());
        if (cur().kind != TokenKind::StringLit)
            syntax_error("expected a string literal", cur().span);
        return tokens_[pos_++].text;
    }

    PredicatePtr parse_atom() {
        if (cur().kind != TokenKind::Ident) syntax_error("expected a predicate atom", cur().span);
        if (cur().text != "it") foreign(cur());
        ++pos_;
        if (cur().kind != TokenKind::Dot) syntax_error("expected '.' after 'it'", cur().span);
        ++pos_;
        if (cur().kind != TokenKind::Ident)
            syntax_error("expected a property name after 'it.'", cur().span);
        Token prop = tokens_[pos_++];
        if (prop.text == "name") {
            CmpOp cmp = parse_cmp(/*ordered=*/false);
            return Predicate::make_text(Predicate::Op::NameCmp, cmp, parse_string_operand());
        }
        if (prop.text == "isTopLevel") return Predicate::make_flag(Predicate::Op::IsTopLevel);
        if (prop.text == "isCompanion") return Predicate::make_flag(Predicate::Op::IsCompanion);
        if (prop.text == "paramCount") {
            CmpOp cmp = parse_cmp(/*ordered=*/true);
            if (cur().kind == TokenKind::Ident) foreign(cur());
            if (cur().kind != TokenKind::IntLit)
                syntax_error("expected an integer literal", cur().span);
            long value = 0;
            try {
                value = std::stol(cur().text);
            } catch (const std::exception&) {
                syntax_error("integer literal out of range", cur().span);
            }
            ++pos_;
            return Predicate::make_param_count(cmp, value);
        }
        if (prop.text == "hasAnnotation" || prop.text == "hasSupertype") {
            bool ann = prop.text == "hasAnnotation";
            if (cur().kind != TokenKind::LParen)
                syntax_error("expected '(' after '" + prop.text + "'", cur().span);
            ++pos_;
            std::string arg = parse_string_operand();
            if (cur().kind != TokenKind::RParen)
                syntax_error("expected ')' after string argument", cur().span);
            ++pos_;
            return Predicate::make_text(
                ann ? Predicate::Op::HasAnnotation : Predicate::Op::HasSupertype, CmpOp::Eq,
                std::move(arg));
        }
        foreign(prop);
    }

    const std::vector<Token>& tokens_;
    std::string file_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Parses a predicate from pre-lexed tokens (must end with Eof).
inline PredicatePtr parse_predicate_tokens(const std::vector<Token>& tokens,
                                           const std::string& file) {
    return detail::PredicateParser(tokens, file).run();
}

inline PredicatePtr parse_predicate(std::string_view text, const std::string& file = "<predicate>") {
    return parse_predicate_tokens(lex(text, file), file);
}

}  // namespace srq
