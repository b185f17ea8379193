// Byte spans and line/column mapping over source text.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace srq {

// Half-open byte range [begin, end) within one file's text.
struct Span {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    [[nodiscard]] std::uint32_t length() const { return end - begin; }
    [[nodiscard]] bool contains(const Span& other) const {
        return begin <= other.begin && other.end <= end;
    }
    [[nodiscard]] bool overlaps(const Span& other) const {
        return begin < other.end && other.begin < end;
    }
    friend bool operator==(const Span&, const Span&) = default;
};

struct LineCol {
    std::uint32_t line = 1;  // 1-based
    std::uint32_t column = 1;  // 1-based, in bytes

    friend bool operator==(const LineCol&, const LineCol&) = default;
};

inline LineCol line_col_at(std::string_view text, std::uint32_t offset) {
    LineCol lc;
    if (offset > text.size()) offset = static_cast<std::uint32_t>(text.size());
    for (std::uint32_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++lc.line;
            lc.column = 1;
        } else {
            ++lc.column;
        }
    }
    return lc;
}

inline std::string_view span_text(std::string_view text, const Span& span) {
    return text.substr(span.begin, span.end - span.begin);
}

}  // namespace srq
