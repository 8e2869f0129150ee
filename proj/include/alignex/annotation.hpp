#pragma once

// Annotations, documents and the two-dimensional annotation grids that the
// aligner operates on. All positions are atom indices (the designated atomic
// annotation type, typically Token, tiles a document with length-1 units).

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace alignex {

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

/// A typed, featured span over a document's atoms. [start, end) in atom indices.
struct Annotation {
    std::string document_id;
    int start = 0;
    int end = 0;
    std::string type;
    std::map<std::string, std::string> features;

    int length() const { return end - start; }

    const std::string* feature(const std::string& name) const {
        auto it = features.find(name);
        return it == features.end() ? nullptr : &it->second;
    }
};

/// The unit of matching: annotation type plus an optional feature/value
/// refinement. A key with a value always carries a feature.
struct ElementKey {
    std::string type;
    std::string feature;  // empty = bare type key
    std::string value;    // empty allowed only together with empty feature, or as a true empty value

    bool has_feature() const { return !feature.empty(); }

    friend bool operator==(const ElementKey&, const ElementKey&) = default;
    friend auto operator<=>(const ElementKey&, const ElementKey&) = default;
};

struct ElementKeyHash {
    size_t operator()(const ElementKey& k) const {
        size_t h = std::hash<std::string>()(k.type);
        h = h * 1315423911u ^ std::hash<std::string>()(k.feature);
        h = h * 1315423911u ^ std::hash<std::string>()(k.value);
        return h;
    }
};

// Reserved key types. They never collide with annotation content in practice;
// the serializer renders them as ":start", ":end", ":target".
inline const std::string kStartType = "start";
inline const std::string kEndType = "end";
inline const std::string kTargetType = "target";

inline ElementKey start_key() { return {kStartType, "", ""}; }
inline ElementKey end_key() { return {kEndType, "", ""}; }
inline ElementKey target_key() { return {kTargetType, "", ""}; }

/// Which features of each annotation type produce matching keys, and whether
/// the bare type itself is a key. Unregistered types fall back to the bare key.
struct KeyDerivationPolicy {
    struct Rule {
        std::vector<std::string> features;
        bool bare = false;
    };
    std::map<std::string, Rule> rules;  // keyed by lowercased type name

    void set(const std::string& type, std::vector<std::string> features, bool bare = false) {
        rules[to_lower(type)] = Rule{std::move(features), bare};
    }

    const Rule* find(const std::string& type) const {
        auto it = rules.find(to_lower(type));
        return it == rules.end() ? nullptr : &it->second;
    }

    /// Token -> {root,string,category}, Date -> {normalized}, Number -> {value}
    /// plus the bare :number key, Lookup -> {majorType}.
    static KeyDerivationPolicy standard() {
        KeyDerivationPolicy p;
        p.set("Token", {"root", "string", "category"});
        p.set("Date", {"normalized"});
        p.set("Number", {"value"}, /*bare=*/true);
        p.set("Lookup", {"majorType"});
        return p;
    }
};

/// Deterministic key set for one annotation. Types and feature names are
/// lowercased; feature values are lowercased as well so that surface-form
/// case differences do not block matches. Total function: unknown types
/// yield the bare-type key.
inline std::vector<ElementKey> derive_keys(const Annotation& a, const KeyDerivationPolicy& policy) {
    std::vector<ElementKey> keys;
    const std::string type = to_lower(a.type);
    const KeyDerivationPolicy::Rule* rule = policy.find(a.type);
    if (!rule) {
        keys.push_back({type, "", ""});
        return keys;
    }
    for (const std::string& f : rule->features) {
        if (const std::string* v = a.feature(f))
            keys.push_back({type, to_lower(f), to_lower(*v)});
    }
    if (rule->bare || keys.empty())
        keys.push_back({type, "", ""});
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

/// A document: atoms tile [0, atom_count) contiguously, every annotation lies
/// within that range, sentence boundaries partition it.
struct Document {
    std::string id;
    std::vector<Annotation> atoms;        // each length 1, atom i at [i, i+1)
    std::vector<Annotation> annotations;  // everything that is not an atom
    std::vector<std::pair<int, int>> sentences;

    int atom_count() const { return static_cast<int>(atoms.size()); }

    /// Sentence partition; a document without explicit boundaries is one sentence.
    std::vector<std::pair<int, int>> sentence_ranges() const {
        if (!sentences.empty())
            return sentences;
        if (atoms.empty())
            return {};
        return {{0, atom_count()}};
    }

    void validate() const {
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].start != static_cast<int>(i) || atoms[i].end != static_cast<int>(i) + 1)
                throw std::invalid_argument("document " + id + ": atoms do not tile at index " +
                                            std::to_string(i));
        }
        for (const Annotation& a : annotations) {
            if (a.start < 0 || a.start >= a.end || a.end > atom_count())
                throw std::invalid_argument("document " + id + ": annotation " + a.type +
                                            " out of range");
        }
        int pos = 0;
        for (auto [s, e] : sentences) {
            if (s != pos || e <= s || e > atom_count())
                throw std::invalid_argument("document " + id + ": sentence boundaries do not partition");
            pos = e;
        }
        if (!sentences.empty() && pos != atom_count())
            throw std::invalid_argument("document " + id + ": sentences do not cover the document");
    }
};

enum class ElementSource { Atom, Annotation, Synthetic };

/// One grid entry: a single derived key with the atom-length of the
/// annotation it came from.
struct GridElement {
    ElementKey key;
    int len = 1;
    ElementSource source = ElementSource::Annotation;
    int source_index = -1;  // atom index or index into Document::annotations

    friend bool operator==(const GridElement&, const GridElement&) = default;
};

/// Per-sentence (or per-window) 2-D lattice: starts[i] holds every element
/// beginning at grid index i. Sentinel :start/:end positions, when present,
/// sit before/after the content and count toward length.
struct AnnotationGrid {
    int length = 0;
    std::vector<std::vector<GridElement>> starts;
    int lead = 0;                // 1 when a :start sentinel occupies index 0
    int trail = 0;               // 1 when an :end sentinel occupies the last index
    std::string document_id;
    int doc_range_start = 0;     // document atom index of the first content position
    int dropped_straddlers = 0;  // annotations that crossed the range boundary

    int content_length() const { return length - lead - trail; }
    int content_begin() const { return lead; }
    int content_end() const { return length - trail; }

    /// Document atom index for a content position; sentinels have none.
    int to_document_atom(int grid_index) const { return doc_range_start + (grid_index - lead); }
    int from_document_atom(int atom) const { return atom - doc_range_start + lead; }

    void add(int index, GridElement e) {
        starts[static_cast<size_t>(index)].push_back(std::move(e));
    }

    const std::vector<GridElement>& at(int index) const {
        return starts[static_cast<size_t>(index)];
    }
};

using AnnotationFilter = std::function<bool(const Annotation&)>;

/// Builds the grid over [range_start, range_end), re-indexed to 0. One element
/// per (annotation, derived key); atoms appear as length-1 elements at their
/// own index. Annotations straddling the range boundary cannot be represented
/// and are dropped into the diagnostics tally. `include` restricts which
/// non-atom annotations participate (null = all).
inline AnnotationGrid build_grid(const Document& doc, int range_start, int range_end,
                                 const KeyDerivationPolicy& policy,
                                 const AnnotationFilter& include = nullptr) {
    if (range_start < 0 || range_end > doc.atom_count() || range_start >= range_end)
        throw std::out_of_range("build_grid: range [" + std::to_string(range_start) + ", " +
                                std::to_string(range_end) + ") outside document " + doc.id);
    AnnotationGrid grid;
    grid.length = range_end - range_start;
    grid.starts.resize(static_cast<size_t>(grid.length));
    grid.document_id = doc.id;
    grid.doc_range_start = range_start;

    for (int i = range_start; i < range_end; ++i) {
        for (ElementKey& k : derive_keys(doc.atoms[static_cast<size_t>(i)], policy))
            grid.add(i - range_start, {std::move(k), 1, ElementSource::Atom, i});
    }
    for (size_t ai = 0; ai < doc.annotations.size(); ++ai) {
        const Annotation& a = doc.annotations[ai];
        if (a.end <= range_start || a.start >= range_end)
            continue;
        if (include && !include(a))
            continue;
        if (a.start < range_start || a.end > range_end) {
            ++grid.dropped_straddlers;
            continue;
        }
        for (ElementKey& k : derive_keys(a, policy))
            grid.add(a.start - range_start,
                     {std::move(k), a.length(), ElementSource::Annotation, static_cast<int>(ai)});
    }
    return grid;
}

/// Returns a copy of `grid` with sentinel positions prepended/appended.
/// Existing sentinels are preserved; requesting one that is already there is
/// a no-op for that side.
inline AnnotationGrid with_sentinels(const AnnotationGrid& grid, bool add_start, bool add_end) {
    const int new_lead = (add_start && grid.lead == 0) ? 1 : 0;
    const int new_trail = (add_end && grid.trail == 0) ? 1 : 0;
    if (new_lead == 0 && new_trail == 0)
        return grid;
    AnnotationGrid out;
    out.length = grid.length + new_lead + new_trail;
    out.starts.resize(static_cast<size_t>(out.length));
    out.lead = grid.lead + new_lead;
    out.trail = grid.trail + new_trail;
    out.document_id = grid.document_id;
    out.doc_range_start = grid.doc_range_start;
    out.dropped_straddlers = grid.dropped_straddlers;
    if (new_lead)
        out.add(0, {start_key(), 1, ElementSource::Synthetic, -1});
    for (int i = 0; i < grid.length; ++i)
        for (const GridElement& e : grid.at(i))
            out.add(i + new_lead, e);
    if (new_trail)
        out.add(out.length - 1, {end_key(), 1, ElementSource::Synthetic, -1});
    return out;
}

}  // namespace alignex
