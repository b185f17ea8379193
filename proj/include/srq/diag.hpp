// Diagnostics: error codes, the exception carrying them, and rendering.
//
// Every user-facing failure is a BuildError with a stable code name that
// appears in the rendered message, e.g. "error[ForeignCapture]: ...".
// InternalError marks invariant breaches inside the tool itself and maps
// to a distinct process exit code.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "srq/span.hpp"

namespace srq {

enum class ErrorCode {
    SyntaxError,
    UnbalancedBlock,
    DuplicateParameterName,
    DuplicateFqn,
    UnresolvedName,
    AmbiguousName,
    CyclicHierarchy,
    MalformedChain,
    MixedModifier,
    PredicateSyntaxError,
    ForeignCapture,
    SmartCallInLibrary,
    VersionMismatch,
    CorruptMeta,
    UnresolvedTypeInMeta,
    FqnCollision,
    DuplicateQueryId,
    MissingResult,
    NoSourceFiles,
    IoError,
    UsageError,
};

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnbalancedBlock: return "UnbalancedBlock";
        case ErrorCode::DuplicateParameterName: return "DuplicateParameterName";
        case ErrorCode::DuplicateFqn: return "DuplicateFqn";
        case ErrorCode::UnresolvedName: return "UnresolvedName";
        case ErrorCode::AmbiguousName: return "AmbiguousName";
        case ErrorCode::CyclicHierarchy: return "CyclicHierarchy";
        case ErrorCode::MalformedChain: return "MalformedChain";
        case ErrorCode::MixedModifier: return "MixedModifier";
        case ErrorCode::PredicateSyntaxError: return "PredicateSyntaxError";
        case ErrorCode::ForeignCapture: return "ForeignCapture";
        case ErrorCode::SmartCallInLibrary: return "SmartCallInLibrary";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptMeta: return "CorruptMeta";
        case ErrorCode::UnresolvedTypeInMeta: return "UnresolvedTypeInMeta";
        case ErrorCode::FqnCollision: return "FqnCollision";
        case ErrorCode::DuplicateQueryId: return "DuplicateQueryId";
        case ErrorCode::MissingResult: return "MissingResult";
        case ErrorCode::NoSourceFiles: return "NoSourceFiles";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "UnknownError";
}

// Location of a diagnostic: file path plus byte span within that file.
struct SourceLoc {
    std::string file;
    Span span;
};

class BuildError : public std::runtime_error {
public:
    BuildError(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    BuildError(ErrorCode code, std::string message, SourceLoc loc)
        : std::runtime_error(std::move(message)), code_(code), loc_(std::move(loc)) {}

    [[nodiscard]] ErrorCode code() const { return code_; }
    [[nodiscard]] const std::optional<SourceLoc>& loc() const { return loc_; }

private:
    ErrorCode code_;
    std::optional<SourceLoc> loc_;
};

// A breached internal invariant (not a user error); exits with code 2.
class InternalError : public std::logic_error {
public:
    explicit InternalError(std::string message) : std::logic_error(std::move(message)) {}
};

// "file:line:col: error[Code]: message", location parts present when known.
// `source` is the text of the file the location points into; pass empty if
// unavailable and the offsets are reported raw.
inline std::string render_diagnostic(const BuildError& err, std::string_view source = {}) {
    std::string out;
    if (err.loc()) {
        out += err.loc()->file;
        out += ':';
        if (!source.empty()) {
            LineCol lc = line_col_at(source, err.loc()->span.begin);
            out += std::to_string(lc.line);
            out += ':';
            out += std::to_string(lc.column);
        } else {
            out += "+" + std::to_string(err.loc()->span.begin);
        }
        out += ": ";
    }
    out += "error[";
    out += error_code_name(err.code());
    out += "]: ";
    out += err.what();
    return out;
}

// Renders the offending line with a caret marking the span start.
inline std::string render_caret(std::string_view source, const Span& span) {
    std::uint32_t begin = span.begin;
    if (begin > source.size()) begin = static_cast<std::uint32_t>(source.size());
    std::uint32_t line_start = begin;
    while (line_start > 0 && source[line_start - 1] != '\n') --line_start;
    std::uint32_t line_end = begin;
    while (line_end < source.size() && source[line_end] != '\n') ++line_end;
    std::string out(source.substr(line_start, line_end - line_start));
    out += '\n';
    out += std::string(begin - line_start, ' ');
    out += '^';
    return out;
}

}  // namespace srq
