// Lexer for .rk source text.
//
// The token set covers declaration syntax, query call-chains, and the
// literal expressions the rewriter emits, so rewritten output lexes with
// the same machinery. `//` starts a line comment; whitespace separates
// tokens and is otherwise ignored.
#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "srq/diag.hpp"
#include "srq/span.hpp"

namespace srq {

enum class TokenKind {
    Ident,
    KwPackage,
    KwClass,
    KwObject,
    KwCompanion,
    KwFun,
    IntLit,
    StringLit,
    At,
    Colon,
    ColonColon,
    Comma,
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    Arrow,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Semi,
    Question,
    Eof,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;  // lexeme; for StringLit the unescaped value
    Span span;

    [[nodiscard]] bool is(TokenKind k) const { return kind == k; }
};

inline std::string_view token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::KwPackage: return "'package'";
        case TokenKind::KwClass: return "'class'";
        case TokenKind::KwObject: return "'object'";
        case TokenKind::KwCompanion: return "'companion'";
        case TokenKind::KwFun: return "'fun'";
        case TokenKind::IntLit: return "integer literal";
        case TokenKind::StringLit: return "string literal";
        case TokenKind::At: return "'@'";
        case TokenKind::Colon: return "':'";
        case TokenKind::ColonColon: return "'::'";
        case TokenKind::Comma: return "','";
        case TokenKind::Dot: return "'.'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Lt: return "'<'";
        case TokenKind::Gt: return "'>'";
        case TokenKind::Le: return "'<='";
        case TokenKind::Ge: return "'>='";
        case TokenKind::EqEq: return "'=='";
        case TokenKind::NotEq: return "'!='";
        case TokenKind::AndAnd: return "'&&'";
        case TokenKind::OrOr: return "'||'";
        case TokenKind::Bang: return "'!'";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::Assign: return "'='";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Semi: return "';'";
        case TokenKind::Question: return "'?'";
        case TokenKind::Eof: return "end of file";
    }
    return "token";
}

namespace detail {

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_ident_part(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace detail

// Lexes the whole input. `file` is used only for diagnostics.
inline std::vector<Token> lex(std::string_view text, const std::string& file) {
    std::vector<Token> out;
    std::uint32_t i = 0;
    const auto n = static_cast<std::uint32_t>(text.size());

    auto fail = [&](std::uint32_t at, const std::string& msg) -> void {
        throw BuildError(ErrorCode::SyntaxError, msg, SourceLoc{file, Span{at, at + 1}});
    };
    auto push = [&](TokenKind k, std::uint32_t begin, std::uint32_t end) {
        out.push_back(Token{k, std::string(text.substr(begin, end - begin)), Span{begin, end}});
    };

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        std::uint32_t begin = i;
        if (detail::is_ident_start(c)) {
            while (i < n && detail::is_ident_part(text[i])) ++i;
            std::string_view word = text.substr(begin, i - begin);
            TokenKind kind = TokenKind::Ident;
            if (word == "package") kind = TokenKind::KwPackage;
            else if (word == "class") kind = TokenKind::KwClass;
            else if (word == "object") kind = TokenKind::KwObject;
            else if (word == "companion") kind = TokenKind::KwCompanion;
            else if (word == "fun") kind = TokenKind::KwFun;
            push(kind, begin, i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            push(TokenKind::IntLit, begin, i);
            continue;
        }
        if (c == '"') {
            ++i;
            std::string value;
            bool closed = false;
            while (i < n) {
                char d = text[i];
                if (d == '"') {
                    ++i;
                    closed = true;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\') {
                    if (i + 1 >= n) break;
                    char e = text[i + 1];
                    if (e == '"') value += '"';
                    else if (e == '\\') value += '\\';
                    else if (e == 'n') value += '\n';
                    else if (e == 't') value += '\t';
                    else fail(i, "unknown escape sequence in string literal");
                    i += 2;
                    continue;
                }
                value += d;
                ++i;
            }
            if (!closed) fail(begin, "unterminated string literal");
            out.push_back(Token{TokenKind::StringLit, std::move(value), Span{begin, i}});
            continue;
        }
        auto two = [&](char second) { return i + 1 < n && text[i + 1] == second; };
        TokenKind kind;
        std::uint32_t len = 1;
        switch (c) {
            case '@': kind = TokenKind::At; break;
            case ':': kind = two(':') ? (len = 2, TokenKind::ColonColon) : TokenKind::Colon; break;
            case ',': kind = TokenKind::Comma; break;
            case '.': kind = TokenKind::Dot; break;
            case '(': kind = TokenKind::LParen; break;
            case ')': kind = TokenKind::RParen; break;
            case '{': kind = TokenKind::LBrace; break;
            case '}': kind = TokenKind::RBrace; break;
            case '[': kind = TokenKind::LBracket; break;
            case ']': kind = TokenKind::RBracket; break;
            case '<': kind = two('=') ? (len = 2, TokenKind::Le) : TokenKind::Lt; break;
            case '>': kind = two('=') ? (len = 2, TokenKind::Ge) : TokenKind::Gt; break;
            case '=': kind = two('=') ? (len = 2, TokenKind::EqEq) : TokenKind::Assign; break;
            case '!': kind = two('=') ? (len = 2, TokenKind::NotEq) : TokenKind::Bang; break;
            case '&':
                if (!two('&')) fail(i, "stray '&', expected '&&'");
                kind = TokenKind::AndAnd;
                len = 2;
                break;
            case '|':
                if (!two('|')) fail(i, "stray '|', expected '||'");
                kind = TokenKind::OrOr;
                len = 2;
                break;
            case '-': kind = two('>') ? (len = 2, TokenKind::Arrow) : TokenKind::Minus; break;
            case '+': kind = TokenKind::Plus; break;
            case '*': kind = TokenKind::Star; break;
            case '/': kind = TokenKind::Slash; break;
            case ';': kind = TokenKind::Semi; break;
            case '?': kind = TokenKind::Question; break;
            default:
                fail(i, std::string("unexpected character '") + c + "'");
                return out;  // unreachable
        }
        push(kind, i, i + len);
        i += len;
    }
    out.push_back(Token{TokenKind::Eof, "", Span{n, n}});
    return out;
}

}  // namespace srq
