#pragma once

// Extraction pattern types and their text serialization.
//
// Wire format, one pattern per field: elements are space-separated, the
// sub-elements of one element are joined by "!", and a sub-element is
// ":" type ["|" feature ["|" value]]. ":target" marks the slot between left
// and right context; ":start" and ":end" are sentence boundary elements.
// Literal "!", "|", space and backslash inside names or values are escaped
// with a backslash.

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"

namespace alignex {

/// One pattern position: a set of co-occurring sub-element keys that must all
/// be present (with a common extent) for the position to match.
struct PatternElement {
    std::vector<ElementKey> keys;

    bool boundary_only() const {
        for (const ElementKey& k : keys)
            if (k.type != kStartType && k.type != kEndType)
                return false;
        return true;
    }

    friend bool operator==(const PatternElement&, const PatternElement&) = default;
};

inline PatternElement canonical_element(std::vector<ElementKey> keys) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return PatternElement{std::move(keys)};
}

/// Left context + target slot + right context. At most one context is empty.
struct ContextPattern {
    std::vector<PatternElement> lc;
    std::vector<PatternElement> rc;
    std::string label;

    size_t element_count() const { return lc.size() + rc.size(); }

    friend bool operator==(const ContextPattern&, const ContextPattern&) = default;
};

/// Element sequence characterizing a target's internal structure.
struct TargetPattern {
    std::vector<PatternElement> elements;
    std::string label;

    friend bool operator==(const TargetPattern&, const TargetPattern&) = default;
};

struct PairStats {
    long applications = 0;
    long true_positives = 0;

    bool evaluable() const { return applications > 0; }
    double precision() const {
        return applications > 0 ? static_cast<double>(true_positives) / applications : 0.0;
    }
};

/// The applicable extraction unit: context pattern + target pattern, emitting
/// annotations of `emitted_type` when both match.
struct PatternTargetPair {
    ContextPattern context;
    TargetPattern target;
    std::string label;         // the gold label this pair extracts (e.g. PER)
    std::string emitted_type;  // annotation type written on a match (e.g. i-per)
    PairStats stats;

    size_t context_length() const { return context.element_count(); }
};

class PatternParseError : public std::runtime_error {
  public:
    PatternParseError(const std::string& what, size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position_(position) {}
    size_t position() const { return position_; }

  private:
    size_t position_;
};

namespace detail {

inline bool needs_escape(char c) {
    return c == '!' || c == '|' || c == ' ' || c == '\\';
}

inline void append_escaped(std::string& out, const std::string& s, bool escape_bar = true) {
    for (char c : s) {
        if (c == '!' || c == ' ' || c == '\\' || (escape_bar && c == '|'))
            out.push_back('\\');
        out.push_back(c);
    }
}

}  // namespace detail

inline std::string serialize_key(const ElementKey& key) {
    for (const std::string* part : {&key.type, &key.feature, &key.value})
        if (part->find('\t') != std::string::npos || part->find('\n') != std::string::npos)
            throw std::invalid_argument(
                "pattern fields cannot contain tab or newline: " + *part);
    std::string out = ":";
    detail::append_escaped(out, key.type);
    if (key.has_feature()) {
        out.push_back('|');
        detail::append_escaped(out, key.feature);
        if (!key.value.empty()) {
            out.push_back('|');
            // Everything after the second bar reads back as the value, so
            // bars inside it stay literal.
            detail::append_escaped(out, key.value, /*escape_bar=*/false);
        }
    }
    return out;
}

inline std::string serialize_element(const PatternElement& e) {
    std::string out;
    for (size_t i = 0; i < e.keys.size(); ++i) {
        if (i)
            out.push_back('!');
        out += serialize_key(e.keys[i]);
    }
    return out;
}

inline std::string serialize_sequence(const std::vector<PatternElement>& elements) {
    std::string out;
    for (size_t i = 0; i < elements.size(); ++i) {
        if (i)
            out.push_back(' ');
        out += serialize_element(elements[i]);
    }
    return out;
}

inline std::string serialize_pattern(const ContextPattern& p) {
    std::string out = serialize_sequence(p.lc);
    if (!out.empty())
        out.push_back(' ');
    out += ":target";
    if (!p.rc.empty()) {
        out.push_back(' ');
        out += serialize_sequence(p.rc);
    }
    return out;
}

inline std::string serialize_pattern(const TargetPattern& p) {
    return serialize_sequence(p.elements);
}

namespace detail {

// Splits on unescaped separators, keeping escape sequences intact so the
// sub-element parser unescapes exactly once. `base` is the offset of `text`
// in the full pattern string, for error positions.
inline std::vector<std::pair<std::string, size_t>> split_escaped(const std::string& text,
                                                                 char sep, size_t base) {
    std::vector<std::pair<std::string, size_t>> parts;
    std::string cur;
    size_t start = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\\') {
            if (i + 1 >= text.size())
                throw PatternParseError("dangling escape", base + i);
            cur.push_back(c);
            cur.push_back(text[++i]);
        } else if (c == sep) {
            parts.emplace_back(cur, base + start);
            cur.clear();
            start = i + 1;
        } else {
            cur.push_back(c);
        }
    }
    parts.emplace_back(cur, base + start);
    return parts;
}

}  // namespace detail

/// Parses one sub-element (":type", ":type|feature" or ":type|feature|value").
inline ElementKey parse_key(const std::string& text, size_t base = 0) {
    if (text.empty() || text[0] != ':')
        throw PatternParseError("sub-element must start with ':'", base);
    const std::string body = text.substr(1);
    // Split on the first two unescaped bars only; a value may contain bars.
    ElementKey key;
    std::string cur;
    int field = 0;
    for (size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '\\') {
            if (i + 1 >= body.size())
                throw PatternParseError("dangling escape", base + 1 + i);
            cur.push_back(body[++i]);
        } else if (c == '|' && field < 2) {
            if (field == 0)
                key.type = cur;
            else
                key.feature = cur;
            cur.clear();
            ++field;
        } else {
            cur.push_back(c);
        }
    }
    if (field == 0)
        key.type = cur;
    else if (field == 1)
        key.feature = cur;
    else
        key.value = cur;
    if (key.type.empty())
        throw PatternParseError("empty annotation type", base);
    if (field >= 1 && key.feature.empty())
        throw PatternParseError("dangling separator: empty feature", base);
    if (field == 2 && key.value.empty())
        throw PatternParseError("dangling separator: empty value", base);
    return key;
}

inline PatternElement parse_element(const std::string& text, size_t base = 0) {
    if (text.empty())
        throw PatternParseError("empty element", base);
    PatternElement e;
    for (auto& [piece, pos] : detail::split_escaped(text, '!', base)) {
        if (piece.empty())
            throw PatternParseError("empty sub-element", pos);
        e.keys.push_back(parse_key(piece, pos));
    }
    return e;
}

namespace detail {

// Raw space-separated tokens with their offsets. Consecutive separators mean
// an empty element, which is an error.
inline std::vector<std::pair<std::string, size_t>> pattern_tokens(const std::string& text) {
    auto parts = split_escaped(text, ' ', 0);
    for (const auto& [piece, pos] : parts)
        if (piece.empty())
            throw PatternParseError("empty element", pos);
    return parts;
}

}  // namespace detail

inline ContextPattern parse_context_pattern(const std::string& text, std::string label = "") {
    ContextPattern p;
    p.label = std::move(label);
    bool seen_target = false;
    for (auto& [piece, pos] : detail::pattern_tokens(text)) {
        if (piece == ":target") {
            if (seen_target)
                throw PatternParseError("duplicate :target slot", pos);
            seen_target = true;
            continue;
        }
        PatternElement e = parse_element(piece, pos);
        for (const ElementKey& k : e.keys)
            if (k.type == kTargetType)
                throw PatternParseError(":target cannot co-occur inside an element", pos);
        (seen_target ? p.rc : p.lc).push_back(std::move(e));
    }
    if (!seen_target)
        throw PatternParseError("context pattern has no :target slot", text.size());
    if (p.lc.empty() && p.rc.empty())
        throw PatternParseError("context pattern has neither left nor right context", 0);
    return p;
}

inline TargetPattern parse_target_pattern(const std::string& text, std::string label = "") {
    TargetPattern p;
    p.label = std::move(label);
    for (auto& [piece, pos] : detail::pattern_tokens(text)) {
        if (piece == ":target")
            throw PatternParseError("target pattern cannot contain :target", pos);
        PatternElement e = parse_element(piece, pos);
        for (const ElementKey& k : e.keys)
            if (k.type == kTargetType)
                throw PatternParseError("target pattern cannot contain :target", pos);
        p.elements.push_back(std::move(e));
    }
    if (p.elements.empty())
        throw PatternParseError("target pattern is empty", 0);
    return p;
}

}  // namespace alignex
