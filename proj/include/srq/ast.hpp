// Parse tree for .rk files: declarations plus opaque function bodies.
//
// Names (annotations, supertypes, parameter/return types) are stored as
// written; resolution to fully qualified names happens when the entity
// index is built, where the whole project is visible.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srq/span.hpp"
#include "srq/token.hpp"
#include "srq/type_ref.hpp"

namespace srq {

enum class DeclKind { Class, Object, Function };

inline std::string_view decl_kind_name(DeclKind k) {
    switch (k) {
        case DeclKind::Class: return "class";
        case DeclKind::Object: return "object";
        case DeclKind::Function: return "function";
    }
    return "declaration";
}

struct Param {
    std::string name;
    TypeRef type;  // nominal names as written

    friend bool operator==(const Param&, const Param&) = default;
};

struct Declaration {
    DeclKind kind = DeclKind::Class;
    std::string name;
    std::vector<std::string> annotations;  // as written, source order
    std::vector<std::string> supertypes;   // classes/objects, as written
    std::vector<Param> params;             // functions
    TypeRef return_type;                   // functions; Unit when omitted
    bool is_companion = false;
    bool is_top_level = false;
    Span span;                      // annotations through closing token
    std::vector<Declaration> children;     // class/object members
    std::vector<Token> body;               // function block tokens, braces excluded
    Span body_span;                        // function block including braces

    // Declared signature, before any receiver is prepended.
    [[nodiscard]] TypeRef declared_signature() const {
        std::vector<TypeRef> ps;
        ps.reserve(params.size());
        for (const Param& p : params) ps.push_back(p.type);
        return TypeRef::function(std::move(ps), return_type);
    }
};

struct SourceFile {
    std::string path;        // project-relative, '/' separated
    std::string package_name;
    std::vector<Declaration> decls;
    std::string raw_text;
};

namespace detail {

inline bool structurally_equal(const Declaration& a, const Declaration& b) {
    if (a.kind != b.kind || a.name != b.name || a.annotations != b.annotations ||
        a.supertypes != b.supertypes || a.params != b.params ||
        !(a.return_type == b.return_type) || a.is_companion != b.is_companion ||
        a.is_top_level != b.is_top_level || a.children.size() != b.children.size() ||
        a.body.size() != b.body.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    for (std::size_t i = 0; i < a.body.size(); ++i)
        if (a.body[i].kind != b.body[i].kind || a.body[i].text != b.body[i].text) return false;
    return true;
}

}  // namespace detail

// Equality modulo spans and raw text; what pretty-print round-trips preserve.
inline bool structurally_equal(const SourceFile& a, const SourceFile& b) {
    if (a.package_name != b.package_name || a.decls.size() != b.decls.size()) return false;
    for (std::size_t i = 0; i < a.decls.size(); ++i)
        if (!detail::structurally_equal(a.decls[i], b.decls[i])) return false;
    return true;
}

namespace detail {

inline std::string print_token(const Token& t) {
    if (t.kind == TokenKind::StringLit) {
        std::string out = "\"";
        for (char c : t.text) {
            if (c == '"') out += "\\\"";
            else if (c == '\\') out += "\\\\";
            else if (c == '\n') out += "\\n";
            else if (c == '\t') out += "\\t";
            else out += c;
        }
        out += '"';
        return out;
    }
    return t.text;
}

inline void print_decl(const Declaration& d, std::string& out, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    for (const std::string& a : d.annotations) {
        out += indent;
        out += '@';
        out += a;
        out += '\n';
    }
    out += indent;
    switch (d.kind) {
        case DeclKind::Class:
        case DeclKind::Object: {
            if (d.is_companion) out += "companion ";
            out += d.kind == DeclKind::Class ? "class " : "object ";
            out += d.name;
            for (std::size_t i = 0; i < d.supertypes.size(); ++i) {
                out += i == 0 ? " : " : ", ";
                out += d.supertypes[i];
            }
            if (!d.children.empty()) {
                out += " {\n";
                for (const Declaration& c : d.children) print_decl(c, out, depth + 1);
                out += indent;
                out += "}";
            }
            out += '\n';
            break;
        }
        case DeclKind::Function: {
            out += "fun ";
            out += d.name;
            out += '(';
            for (std::size_t i = 0; i < d.params.size(); ++i) {
                if (i) out += ", ";
                out += d.params[i].name;
                out += ": ";
                out += d.params[i].type.to_string();
            }
            out += "): ";
            out += d.return_type.to_string();
            out += " {";
            for (const Token& t : d.body) {
                out += ' ';
                out += print_token(t);
            }
            out += " }\n";
            break;
        }
    }
}

}  // namespace detail

// Canonical text form; parsing it back yields a structurally equal tree.
inline std::string print_source(const SourceFile& file) {
    std::string out = "package " + file.package_name + "\n";
    for (const Declaration& d : file.decls) {
        out += '\n';
        detail::print_decl(d, out, 0);
    }
    return out;
}

}  // namespace srq
