// Recursive-descent parser for .rk files.
//
// Grammar (whitespace-insensitive, // line comments):
//
//   file       := "package" qname decl*
//   decl       := ann* (classDecl | objectDecl | funDecl)
//   ann        := "@" qname
//   classDecl  := "class" IDENT (":" qname ("," qname)*)? body?
//   objectDecl := "companion"? "object" IDENT (":" qname ("," qname)*)? body?
//   funDecl    := "fun" IDENT "(" params? ")" (":" type)? block
//   params     := IDENT ":" type ("," IDENT ":" type)*
//   type       := qname | "(" (type ("," type)*)? ")" "->" type
//   body       := "{" decl* "}"
//   block      := "{" balanced-token-stream "}"
//   qname      := IDENT ("." IDENT)*
//
// A function without a declared return type returns Unit. Function blocks
// are kept as raw token streams; only query call-chains are interpreted
// in them, later, by the extraction pass.
#pragma once

#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "srq/ast.hpp"
#include "srq/diag.hpp"
#include "srq/token.hpp"
#include "srq/type_ref.hpp"

namespace srq {

namespace detail {

class Parser {
public:
    Parser(std::string path, std::string text)
        : path_(std::move(path)), text_(std::move(text)) {}

    SourceFile run() {
        tokens_ = lex(text_, path_);
        SourceFile file;
        file.path = path_;
        expect(TokenKind::KwPackage, "a file starts with a package declaration");
        file.package_name = parse_qname();
        while (!at(TokenKind::Eof)) file.decls.push_back(parse_decl(/*in_class=*/false, true));
        file.raw_text = std::move(text_);
        return file;
    }

private:
    [[nodiscard]] const Token& cur() const { return tokens_[pos_]; }
    [[nodiscard]] bool at(TokenKind k) const { return cur().kind == k; }

    [[noreturn]] void fail(ErrorCode code, const std::string& msg, Span span) const {
        throw BuildError(code, msg, SourceLoc{path_, span});
    }
    [[noreturn]] void fail_here(const std::string& msg) const {
        fail(ErrorCode::SyntaxError, msg + ", found " + std::string(token_kind_name(cur().kind)),
             cur().span);
    }

    Token expect(TokenKind k, const std::string& what) {
        if (!at(k)) fail_here("expected " + std::string(token_kind_name(k)) + " (" + what + ")");
        return tokens_[pos_++];
    }

    std::string parse_qname() {
        std::string name = expect(TokenKind::Ident, "qualified name").text;
        while (at(TokenKind::Dot)) {
            ++pos_;
            name += '.';
            name += expect(TokenKind::Ident, "qualified name segment").text;
        }
        return name;
    }

    TypeRef parse_type() {
        std::size_t p = pos_;
        auto fail_at = [&](std::size_t at_pos, const std::string& msg) {
            fail(ErrorCode::SyntaxError, msg, tokens_[at_pos].span);
        };
        TypeRef t = parse_type_at(tokens_, p, fail_at);
        pos_ = p;
        return t;
    }

    Declaration parse_decl(bool in_class, bool top_level) {
        Declaration d;
        d.is_top_level = top_level;
        std::uint32_t begin = cur().span.begin;
        while (at(TokenKind::At)) {
            ++pos_;
            d.annotations.push_back(parse_qname());
        }
        if (at(TokenKind::KwCompanion)) {
            if (!in_class)
                fail(ErrorCode::SyntaxError, "'companion' is only allowed on objects declared inside a class",
                     cur().span);
            d.is_companion = true;
            ++pos_;
            if (!at(TokenKind::KwObject)) fail_here("expected 'object' after 'companion'");
        }
        if (at(TokenKind::KwClass) || at(TokenKind::KwObject)) {
            d.kind = at(TokenKind::KwClass) ? DeclKind::Class : DeclKind::Object;
            ++pos_;
            Token name = expect(TokenKind::Ident, "declaration name");
            d.name = name.text;
            std::uint32_t end = name.span.end;
            if (at(TokenKind::Colon)) {
                ++pos_;
                d.supertypes.push_back(parse_qname());
                while (at(TokenKind::Comma)) {
                    ++pos_;
                    d.supertypes.push_back(parse_qname());
                }
                end = tokens_[pos_ - 1].span.end;
            }
            if (at(TokenKind::LBrace)) {
                ++pos_;
                while (!at(TokenKind::RBrace)) {
                    if (at(TokenKind::Eof))
                        fail(ErrorCode::UnbalancedBlock, "unterminated " +
                                 std::string(decl_kind_name(d.kind)) + " body", Span{begin, cur().span.end});
                    d.children.push_back(parse_decl(d.kind == DeclKind::Class, false));
                }
                end = cur().span.end;
                ++pos_;
            }
            d.span = Span{begin, end};
            return d;
        }
        if (at(TokenKind::KwFun)) {
            d.kind = DeclKind::Function;
            ++pos_;
            d.name = expect(TokenKind::Ident, "function name").text;
            expect(TokenKind::LParen, "parameter list");
            std::unordered_set<std::string> seen;
            while (!at(TokenKind::RParen)) {
                if (!d.params.empty()) expect(TokenKind::Comma, "parameter separator");
                Token pname = expect(TokenKind::Ident, "parameter name");
                if (!seen.insert(pname.text).second)
                    fail(ErrorCode::DuplicateParameterName,
                         "duplicate parameter name '" + pname.text + "'", pname.span);
                expect(TokenKind::Colon, "parameter type");
                d.params.push_back(Param{pname.text, parse_type()});
            }
            ++pos_;  // ')'
            if (at(TokenKind::Colon)) {
                ++pos_;
                d.return_type = parse_type();
            } else {
                d.return_type = unit_type();
            }
            parse_block(d);
            d.span = Span{begin, d.body_span.end};
            return d;
        }
        fail_here("expected 'class', 'object', 'companion' or 'fun'");
    }

    // Collects tokens of one balanced { ... } block into d.body.
    void parse_block(Declaration& d) {
        Token open = expect(TokenKind::LBrace, "function body");
        std::vector<TokenKind> stack;  // open parens/braces inside the block
        while (true) {
            const Token& t = cur();
            switch (t.kind) {
                case TokenKind::Eof:
                    fail(ErrorCode::UnbalancedBlock, "unterminated function body",
                         Span{open.span.begin, t.span.end});
                case TokenKind::LParen:
                case TokenKind::LBrace:
                    stack.push_back(t.kind);
                    break;
                case TokenKind::RParen:
                    if (stack.empty() || stack.back() != TokenKind::LParen)
                        fail(ErrorCode::UnbalancedBlock, "unbalanced ')' in function body", t.span);
                    stack.pop_back();
                    break;
                case TokenKind::RBrace:
                    if (stack.empty()) {
                        d.body_span = Span{open.span.begin, t.span.end};
                        ++pos_;
                        return;
                    }
                    if (stack.back() != TokenKind::LBrace)
                        fail(ErrorCode::UnbalancedBlock, "unbalanced '}' in function body", t.span);
                    stack.pop_back();
                    break;
                default:
                    break;
            }
            d.body.push_back(t);
            ++pos_;
        }
    }

    std::string path_;
    std::string text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline SourceFile parse_file(std::string path, std::string text) {
    return detail::Parser(std::move(path), std::move(text)).run();
}

}  // namespace srq
