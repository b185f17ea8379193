// Query call-chain extraction and normalization.
//
// Chains are recognized inside function bodies:
//
//   core  := "Reflekt" "." ("classes"|"objects"|"functions") "(" ")"
//            modifier* (".toList" "(" ")" | ".toSet" "(" ")")
//   modifier := ".withSupertype" "<" qname ">"
//             | ".withSupertypes" "<" qname ("," qname)* ">"
//             | ".withSignature" "<" type ">"
//             | ".withAnnotations" "<" qname ("," qname)* ">"
//   smart := "SmartReflekt" "." ("classes"|"objects") "<" qname ">" callParens?
//            ".filter" "{" pred "}" ".resolve" "(" ")"
//          | "SmartReflekt" "." "functions" "<" type ">" callParens?
//            ".filter" "{" pred "}" ".resolve" "(" ")"
//
// An occurrence of the root identifiers that does not begin a complete,
// well-formed chain is MalformedChain: partially built queries cannot be
// resolved at build time. Each modifier may appear at most once, and a
// modifier that does not apply to the queried kind is MixedModifier.
//
// All type arguments and annotation names are resolved to fully qualified
// names here, against the whole project.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "srq/ast.hpp"
#include "srq/diag.hpp"
#include "srq/entity.hpp"
#include "srq/predicate.hpp"
#include "srq/token.hpp"
#include "srq/type_ref.hpp"

namespace srq {

enum class ResultShape { List, Set };

inline std::string_view result_shape_name(ResultShape s) {
    return s == ResultShape::List ? "list" : "set";
}

struct QuerySite {
    std::string file;
    Span span;  // whole chain, root identifier through closing ')'

    friend bool operator==(const QuerySite&, const QuerySite&) = default;
};

struct Query {
    EntityKind kind = EntityKind::Class;
    std::vector<TypeRef> supertypes;        // sorted unique, nominal
    std::optional<TypeRef> signature;       // function queries
    std::vector<std::string> annotations;   // sorted unique FQNs
    PredicatePtr predicate;                 // extended queries only
    ResultShape shape = ResultShape::List;
    QuerySite site;                         // empty for queries loaded from meta

    [[nodiscard]] bool is_extended() const { return predicate != nullptr; }
};

// Canonical chain rendering. Two queries are the same query exactly when
// their descriptors are equal; the descriptor is also what gets hashed
// into the query id and printed by `resolve`.
inline std::string query_descriptor(const Query& q) {
    std::string kind_call = q.kind == EntityKind::Class    ? "classes"
                            : q.kind == EntityKind::Object ? "objects"
                                                           : "functions";
    std::string out;
    if (q.is_extended()) {
        out = "SmartReflekt." + kind_call + "<";
        if (q.kind == EntityKind::Function) {
            out += q.signature ? q.signature->to_string() : "";
        } else {
            out += q.supertypes.empty() ? kAnyName : q.supertypes.front().to_string();
        }
        out += ">().filter { " + print_predicate(*q.predicate) + " }.resolve()";
        return out;
    }
    out = "Reflekt." + kind_call + "()";
    if (!q.supertypes.empty()) {
        out += ".withSupertypes<";
        for (std::size_t i = 0; i < q.supertypes.size(); ++i) {
            if (i) out += ", ";
            out += q.supertypes[i].to_string();
        }
        out += ">()";
    }
    if (q.signature) out += ".withSignature<" + q.signature->to_string() + ">()";
    if (!q.annotations.empty()) {
        out += ".withAnnotations<";
        for (std::size_t i = 0; i < q.annotations.size(); ++i) {
            if (i) out += ", ";
            out += q.annotations[i];
        }
        out += ">()";
    }
    out += q.shape == ResultShape::Set ? ".toSet()" : ".toList()";
    return out;
}

// FNV-1a over the descriptor; stable across platforms and runs.
inline std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // offset basis
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;  // prime
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string query_id(const Query& q) { return fnv1a_hex(query_descriptor(q)); }

inline bool same_query(const Query& a, const Query& b) {
    return query_descriptor(a) == query_descriptor(b);
}

namespace detail {

// Parses chains out of one function body's token stream. The body tokens
// are copied with an Eof sentinel appended so lookahead never runs off
// the end of a truncated chain.
class ChainScanner {
public:
    ChainScanner(const std::vector<Token>& body, Span body_span, const EntityIndex& index,
                 std::string file, std::string package_name)
        : body_(body), index_(index), file_(std::move(file)), pkg_(std::move(package_name)) {
        std::uint32_t end = body_span.end > 0 ? body_span.end - 1 : 0;
        body_.push_back(Token{TokenKind::Eof, "", Span{end, end}});
    }

    void scan(std::vector<Query>& out) {
        for (pos_ = 0; body_[pos_].kind != TokenKind::Eof; ++pos_) {
            const Token& t = body_[pos_];
            if (t.kind != TokenKind::Ident) continue;
            if (t.text != "Reflekt" && t.text != "SmartReflekt") continue;
            if (pos_ > 0 && body_[pos_ - 1].kind == TokenKind::Dot) continue;  // member access
            chain_begin_ = t.span.begin;
            std::string root = t.text;
            Query q = root == "Reflekt" ? parse_core() : parse_smart();
            q.site = QuerySite{file_, Span{chain_begin_, body_[pos_ - 1].span.end}};
            out.push_back(std::move(q));
            --pos_;  // loop increment moves past the chain's last token
        }
    }

private:
    [[nodiscard]] const Token& cur() const { return body_[pos_]; }

    [[noreturn]] void malformed(const std::string& msg) const {
        throw BuildError(ErrorCode::MalformedChain, msg,
                         SourceLoc{file_, Span{chain_begin_, cur().span.end}});
    }

    Token expect(TokenKind k, const std::string& what) {
        if (cur().kind != k)
            malformed("expected " + std::string(token_kind_name(k)) + " " + what);
        return body_[pos_++];
    }

    void expect_call_parens(const std::string& what) {
        expect(TokenKind::LParen, what);
        expect(TokenKind::RParen, what);
    }

    std::string parse_qname_resolved() {
        Token first = expect(TokenKind::Ident, "in type argument");
        std::string name = first.text;
        std::uint32_t end = first.span.end;
        while (cur().kind == TokenKind::Dot) {
            ++pos_;
            Token seg = expect(TokenKind::Ident, "in qualified name");
            name += '.';
            name += seg.text;
            end = seg.span.end;
        }
        return resolve_name(index_, pkg_, name, SourceLoc{file_, Span{first.span.begin, end}});
    }

    TypeRef parse_type_resolved() {
        std::size_t p = pos_;
        std::uint32_t begin = cur().span.begin;
        auto fail_at = [&](std::size_t at, const std::string& msg) {
            pos_ = at;
            malformed(msg);
        };
        TypeRef raw = parse_type_at(body_, p, fail_at);
        Span span{begin, body_[p - 1].span.end};
        pos_ = p;
        return raw.map_nominals([&](const std::string& n) {
            return resolve_name(index_, pkg_, n, SourceLoc{file_, span});
        });
    }

    EntityKind parse_kind_word() {
        Token word = expect(TokenKind::Ident, "after '.'");
        if (word.text == "classes") return EntityKind::Class;
        if (word.text == "objects") return EntityKind::Object;
        if (word.text == "functions") return EntityKind::Function;
        --pos_;
        malformed("expected 'classes', 'objects' or 'functions', found '" + word.text + "'");
    }

    Query parse_core() {
        ++pos_;  // Reflekt
        expect(TokenKind::Dot, "after 'Reflekt'");
        Query q;
        q.kind = parse_kind_word();
        expect_call_parens("after the kind selector");
        std::set<TypeRef> supertypes;
        std::set<std::string> annotations;
        bool saw_supertypes = false, saw_signature = false, saw_annotations = false;
        while (true) {
            if (cur().kind != TokenKind::Dot) malformed("incomplete chain: expected '.toList()' or '.toSet()'");
            ++pos_;
            Token word = expect(TokenKind::Ident, "chain call");
            if (word.text == "toList" || word.text == "toSet") {
                expect_call_parens("after '" + word.text + "'");
                q.shape = word.text == "toSet" ? ResultShape::Set : ResultShape::List;
                break;
            }
            if (word.text == "withSupertype" || word.text == "withSupertypes") {
                if (q.kind == EntityKind::Function) {
                    pos_ -= 1;
                    throw BuildError(ErrorCode::MixedModifier,
                                     "'" + word.text + "' does not apply to function queries",
                                     SourceLoc{file_, word.span});
                }
                if (saw_supertypes) malformed("duplicate supertype modifier");
                saw_supertypes = true;
                expect(TokenKind::Lt, "type argument list");
                supertypes.insert(TypeRef::nominal(parse_qname_resolved()));
                while (word.text == "withSupertypes" && cur().kind == TokenKind::Comma) {
                    ++pos_;
                    supertypes.insert(TypeRef::nominal(parse_qname_resolved()));
                }
                expect(TokenKind::Gt, "closing type argument list");
                expect_call_parens("after type arguments");
                continue;
            }
            if (word.text == "withSignature") {
                if (q.kind != EntityKind::Function)
                    throw BuildError(ErrorCode::MixedModifier,
                                     "'withSignature' applies only to function queries",
                                     SourceLoc{file_, word.span});
                if (saw_signature) malformed("duplicate 'withSignature' modifier");
                saw_signature = true;
                expect(TokenKind::Lt, "type argument");
                TypeRef sig = parse_type_resolved();
                if (!sig.is_function())
                    malformed("'withSignature' takes a function type such as '() -> Unit'");
                q.signature = std::move(sig);
                expect(TokenKind::Gt, "closing type argument");
                expect_call_parens("after the signature argument");
                continue;
            }
            if (word.text == "withAnnotations") {
                if (saw_annotations) malformed("duplicate 'withAnnotations' modifier");
                saw_annotations = true;
                expect(TokenKind::Lt, "type argument list");
                annotations.insert(parse_qname_resolved());
                while (cur().kind == TokenKind::Comma) {
                    ++pos_;
                    annotations.insert(parse_qname_resolved());
                }
                expect(TokenKind::Gt, "closing type argument list");
                expect_call_parens("after annotation arguments");
                continue;
            }
            --pos_;
            malformed("unknown chain call '" + word.text + "'");
        }
        q.supertypes.assign(supertypes.begin(), supertypes.end());
        q.annotations.assign(annotations.begin(), annotations.end());
        return q;
    }

    Query parse_smart() {
        ++pos_;  // SmartReflekt
        expect(TokenKind::Dot, "after 'SmartReflekt'");
        Query q;
        q.kind = parse_kind_word();
        expect(TokenKind::Lt, "type argument");
        if (q.kind == EntityKind::Function) {
            TypeRef sig = parse_type_resolved();
            if (!sig.is_function())
                malformed("'SmartReflekt.functions' takes a function type argument");
            q.signature = std::move(sig);
        } else {
            q.supertypes.push_back(TypeRef::nominal(parse_qname_resolved()));
        }
        expect(TokenKind::Gt, "closing type argument");
        if (cur().kind == TokenKind::LParen) expect_call_parens("after the type argument");
        expect(TokenKind::Dot, "before 'filter'");
        Token filter_word = expect(TokenKind::Ident, "chain call");
        if (filter_word.text != "filter") malformed("expected '.filter { ... }'");
        expect(TokenKind::LBrace, "filter body");
        std::vector<Token> pred_tokens;
        int depth = 0;
        while (true) {
            const Token& t = body_[pos_];
            if (t.kind == TokenKind::Eof) malformed("unterminated filter body");
            if (t.kind == TokenKind::LBrace) ++depth;
            if (t.kind == TokenKind::RBrace) {
                if (depth == 0) break;
                --depth;
            }
            pred_tokens.push_back(t);
            ++pos_;
        }
        if (pred_tokens.empty()) malformed("empty filter body");
        pred_tokens.push_back(Token{TokenKind::Eof, "", Span{cur().span.begin, cur().span.begin}});
        q.predicate = parse_predicate_tokens(pred_tokens, file_);
        ++pos_;  // '}'
        expect(TokenKind::Dot, "before 'resolve'");
        Token resolve_word = expect(TokenKind::Ident, "chain call");
        if (resolve_word.text != "resolve") malformed("expected '.resolve()'");
        expect_call_parens("after 'resolve'");
        q.shape = ResultShape::List;
        return q;
    }

    std::vector<Token> body_;  // body tokens plus an Eof sentinel
    const EntityIndex& index_;
    std::string file_;
    std::string pkg_;
    std::size_t pos_ = 0;
    std::uint32_t chain_begin_ = 0;
};

inline void collect_queries(const SourceFile& file, const Declaration& d, const EntityIndex& index,
                            std::vector<Query>& out) {
    if (d.kind == DeclKind::Function && !d.body.empty()) {
        ChainScanner scanner(d.body, d.body_span, index, file.path, file.package_name);
        scanner.scan(out);
    }
    for (const Declaration& child : d.children) collect_queries(file, child, index, out);
}

}  // namespace detail

// Extracts every query chain in the project, ordered by (file, position).
// `files` must be ordered by path; build_index's inputs are.
inline std::vector<Query> extract_queries(const std::vector<SourceFile>& files,
                                          const EntityIndex& index) {
    std::vector<Query> out;
    for (const SourceFile& f : files)
        for (const Declaration& d : f.decls) detail::collect_queries(f, d, index, out);
    std::stable_sort(out.begin(), out.end(), [](const Query& a, const Query& b) {
        if (a.site.file != b.site.file) return a.site.file < b.site.file;
        return a.site.span.begin < b.site.span.begin;
    });
    return out;
}

}  // namespace srq
