#pragma once

// Pattern application: locate the left context, then the nearest right
// context after it, validate the candidate in between against the target
// pattern, and emit annotations. Application iterates corpus-wide to a
// fixpoint so that patterns consuming annotations produced by other patterns
// eventually fire.
//
// Application-time matching is exact, gapless and contiguous: every
// sub-element key of a pattern position must be present at the grid index
// with a common extent.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"
#include "alignex/parallel.hpp"
#include "alignex/pattern.hpp"

namespace alignex {

struct MatchResult {
    std::string document_id;
    int start = 0, end = 0;  // document atom coords, non-empty
    size_t pair_index = 0;
    int iteration = 0;

    friend auto operator<=>(const MatchResult&, const MatchResult&) = default;
};

namespace detail {

/// Extents L such that every key of the element starts at `index` with length L.
inline std::vector<int> element_match_lengths(const AnnotationGrid& grid,
                                              const PatternElement& element, int index) {
    std::vector<int> lengths;
    bool first = true;
    for (const ElementKey& key : element.keys) {
        std::vector<int> found;
        for (const GridElement& e : grid.at(index))
            if (e.key == key)
                found.push_back(e.len);
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end()), found.end());
        if (first) {
            lengths = std::move(found);
            first = false;
        } else {
            std::vector<int> common;
            std::set_intersection(lengths.begin(), lengths.end(), found.begin(), found.end(),
                                  std::back_inserter(common));
            lengths = std::move(common);
        }
        if (lengths.empty())
            return lengths;
    }
    return lengths;
}

inline bool match_from(const AnnotationGrid& grid, const std::vector<PatternElement>& elements,
                       size_t pos, int index, int limit, bool exact_end,
                       std::optional<int>& best_end) {
    if (pos == elements.size()) {
        if (exact_end && index != limit)
            return false;
        if (!best_end || index < *best_end)
            best_end = index;
        return true;
    }
    if (index >= limit)
        return false;  // elements remain but no room left
    bool any = false;
    for (int len : element_match_lengths(grid, elements[pos], index)) {
        if (index + len > limit)
            continue;
        if (match_from(grid, elements, pos + 1, index + len, limit, exact_end, best_end))
            any = true;
    }
    return any;
}

}  // namespace detail

/// Matches the element sequence starting exactly at `start`; returns the
/// smallest reachable end index, or nothing. An empty sequence matches
/// everywhere with end == start.
inline std::optional<int> match_context_at(const AnnotationGrid& grid,
                                           const std::vector<PatternElement>& elements,
                                           int start) {
    if (start < 0 || start > grid.length)
        return std::nullopt;
    std::optional<int> best;
    detail::match_from(grid, elements, 0, start, grid.length, /*exact_end=*/false, best);
    return best;
}

/// True when the sequence consumes [start, end) exactly, with every step
/// inside the range.
inline bool matches_exactly(const AnnotationGrid& grid,
                            const std::vector<PatternElement>& elements, int start, int end) {
    if (start < 0 || end > grid.length || start > end)
        return false;
    std::optional<int> best;
    return detail::match_from(grid, elements, 0, start, end, /*exact_end=*/true, best);
}

/// All extractions of one pattern-target pair on one sentence grid. Ranges
/// are in document atom coordinates.
inline std::vector<MatchResult> apply_pair(const PatternTargetPair& pair,
                                           const AnnotationGrid& grid, size_t pair_index = 0,
                                           int iteration = 0) {
    const int content_begin = grid.content_begin();
    const int content_end = grid.content_end();
    std::set<std::pair<int, int>> candidates;

    if (!pair.context.lc.empty()) {
        for (int s = 0; s <= grid.length; ++s) {
            const std::optional<int> e = match_context_at(grid, pair.context.lc, s);
            if (!e)
                continue;
            if (!pair.context.rc.empty()) {
                // Nearest right-context occurrence after the left context;
                // if it fails validation there is no fallback search.
                for (int b = *e + 1; b <= grid.length; ++b) {
                    if (match_context_at(grid, pair.context.rc, b)) {
                        candidates.insert({*e, b});
                        break;
                    }
                }
            } else if (*e < content_end) {
                candidates.insert({*e, content_end});
            }
        }
    } else {
        for (int b = content_begin + 1; b <= grid.length; ++b)
            if (match_context_at(grid, pair.context.rc, b))
                candidates.insert({content_begin, b});
    }

    std::vector<MatchResult> results;
    for (auto [s, e] : candidates) {
        if (s < content_begin || e > content_end || s >= e)
            continue;
        if (!matches_exactly(grid, pair.target.elements, s, e))
            continue;
        results.push_back({grid.document_id, grid.to_document_atom(s), grid.to_document_atom(e),
                           pair_index, iteration});
    }
    return results;
}

/// Builds the per-sentence grid seen by application; the pipeline binds the
/// key policy and annotation filters here.
using GridFactory =
    std::function<AnnotationGrid(const Document&, int sentence_start, int sentence_end)>;

struct FixpointConfig {
    int max_iterations = 10;
    unsigned threads = 0;
};

struct FixpointSummary {
    int iterations = 0;        // productive + the final empty one
    long annotations_added = 0;
};

/// Applies every pair to every sentence, merges the emissions, rebuilds the
/// grids, and repeats until an iteration adds nothing. All matches of one
/// iteration run against the iteration-start snapshot, so pair order never
/// matters. The annotation set grows monotonically, which bounds the loop;
/// the cap is a defensive guard.
inline FixpointSummary run_to_fixpoint(const std::vector<PatternTargetPair>& pairs,
                                       std::vector<Document>& corpus,
                                       const GridFactory& make_grid,
                                       const FixpointConfig& cfg = {}) {
    FixpointSummary summary;
    std::set<std::tuple<std::string, int, int, std::string>> existing;
    for (const Document& doc : corpus)
        for (const Annotation& a : doc.annotations)
            existing.insert({doc.id, a.start, a.end, a.type});

    for (int iteration = 1;; ++iteration) {
        if (iteration > cfg.max_iterations)
            throw std::runtime_error("run_to_fixpoint: no fixpoint after " +
                                     std::to_string(cfg.max_iterations) + " iterations");
        ++summary.iterations;

        std::vector<std::pair<size_t, std::pair<int, int>>> jobs;  // (doc index, sentence)
        for (size_t d = 0; d < corpus.size(); ++d)
            for (auto sent : corpus[d].sentence_ranges())
                jobs.emplace_back(d, sent);

        std::vector<std::vector<MatchResult>> slots(jobs.size());
        detail::parallel_for(jobs.size(), cfg.threads, [&](size_t idx) {
            const auto& [d, sent] = jobs[idx];
            const AnnotationGrid grid = make_grid(corpus[d], sent.first, sent.second);
            for (size_t p = 0; p < pairs.size(); ++p) {
                std::vector<MatchResult> found = apply_pair(pairs[p], grid, p, iteration);
                slots[idx].insert(slots[idx].end(), found.begin(), found.end());
            }
        });

        long added = 0;
        for (size_t idx = 0; idx < jobs.size(); ++idx) {
            Document& doc = corpus[jobs[idx].first];
            for (const MatchResult& r : slots[idx]) {
                const std::string& type = pairs[r.pair_index].emitted_type;
                if (!existing.insert({doc.id, r.start, r.end, type}).second)
                    continue;
                doc.annotations.push_back({doc.id, r.start, r.end, type, {}});
                ++added;
            }
        }
        summary.annotations_added += added;
        if (added == 0)
            break;
    }
    return summary;
}

}  // namespace alignex
