#pragma once

// Pattern generation: pairwise alignment of target neighborhoods produces
// context patterns, pairwise alignment of target-covered grids produces
// target patterns. Commonalities between two general contexts become the
// specific context; the designated target matches at an elevated score so
// the slot survives into every useful alignment.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "alignex/align.hpp"
#include "alignex/annotation.hpp"
#include "alignex/parallel.hpp"
#include "alignex/pattern.hpp"

namespace alignex {

/// The window around one target instance: the containing sentence by default,
/// or a +-k token window. The grid carries the reserved :target element over
/// the instance plus :start/:end sentinels at sentence boundaries.
struct GeneralContext {
    std::string document_id;
    int range_start = 0, range_end = 0;  // document atom coords
    int target_start = 0, target_end = 0;
    std::string label;
    AnnotationGrid grid;
};

struct GenerationConfig {
    ScoringConfig scoring;
    int token_window = -1;          // < 0: whole sentence
    size_t max_pairs = 1'000'000;   // alignment jobs per label before sampling
    unsigned seed = 1;
    unsigned threads = 0;           // 0 = hardware concurrency
};

struct ContextExtraction {
    std::vector<GeneralContext> contexts;
    int skipped_cross_sentence = 0;
};

namespace detail {

inline bool is_sentence_start(const Document& doc, int atom) {
    for (auto [s, e] : doc.sentence_ranges())
        if (s == atom)
            return true;
    return false;
}

inline bool is_sentence_end(const Document& doc, int atom) {
    for (auto [s, e] : doc.sentence_ranges())
        if (e == atom)
            return true;
    return false;
}

}  // namespace detail

/// One GeneralContext per in-sentence instance of `target_type`. Instances
/// spanning a sentence boundary cannot be framed and are counted as skipped.
/// `include` filters which annotations join the grid (gold labels stay out).
inline ContextExtraction extract_general_contexts(const std::vector<Document>& corpus,
                                                  const std::string& target_type,
                                                  const KeyDerivationPolicy& policy,
                                                  const GenerationConfig& cfg,
                                                  const AnnotationFilter& include = nullptr) {
    ContextExtraction out;
    for (const Document& doc : corpus) {
        const auto sentences = doc.sentence_ranges();
        for (const Annotation& a : doc.annotations) {
            if (a.type != target_type)
                continue;
            const std::pair<int, int>* home = nullptr;
            for (const auto& s : sentences)
                if (a.start >= s.first && a.start < s.second) {
                    home = &s;
                    break;
                }
            if (!home || a.end > home->second) {
                ++out.skipped_cross_sentence;
                continue;
            }
            int lo = home->first;
            int hi = home->second;
            if (cfg.token_window >= 0) {
                lo = std::max(0, a.start - cfg.token_window);
                hi = std::min(doc.atom_count(), a.end + cfg.token_window);
            }
            GeneralContext gc;
            gc.document_id = doc.id;
            gc.range_start = lo;
            gc.range_end = hi;
            gc.target_start = a.start;
            gc.target_end = a.end;
            gc.label = target_type;
            AnnotationGrid grid = build_grid(doc, lo, hi, policy, include);
            grid.add(a.start - lo, {target_key(), a.length(), ElementSource::Synthetic, -1});
            gc.grid = with_sentinels(grid, detail::is_sentence_start(doc, lo),
                                     detail::is_sentence_end(doc, hi));
            out.contexts.push_back(std::move(gc));
        }
    }
    return out;
}

namespace detail {

inline std::string grid_signature(const AnnotationGrid& g) {
    std::string sig = std::to_string(g.length) + ";";
    for (int i = 0; i < g.length; ++i) {
        std::vector<std::string> entries;
        for (const GridElement& e : g.at(i))
            entries.push_back(serialize_key(e.key) + "#" + std::to_string(e.len));
        std::sort(entries.begin(), entries.end());
        for (const std::string& s : entries)
            sig += s + ",";
        sig += ";";
    }
    return sig;
}

struct PairPlan {
    std::vector<std::pair<size_t, size_t>> pairs;  // indices into the unique list
};

// Unique grids pair i<j once; a bucket holding duplicates additionally pairs
// with itself once. Past max_pairs the plan is a seeded uniform sample.
inline PairPlan plan_pairs(size_t unique_count, const std::vector<size_t>& multiplicity,
                           size_t max_pairs, unsigned seed) {
    PairPlan plan;
    const size_t self_pairs =
        static_cast<size_t>(std::count_if(multiplicity.begin(), multiplicity.end(),
                                          [](size_t c) { return c >= 2; }));
    const size_t cross_pairs = unique_count * (unique_count > 0 ? unique_count - 1 : 0) / 2;
    const size_t total = cross_pairs + self_pairs;
    if (total <= max_pairs) {
        for (size_t i = 0; i < unique_count; ++i) {
            if (multiplicity[i] >= 2)
                plan.pairs.emplace_back(i, i);
            for (size_t j = i + 1; j < unique_count; ++j)
                plan.pairs.emplace_back(i, j);
        }
        return plan;
    }
    std::mt19937 rng(seed);
    std::uniform_int_distribution<size_t> dist(0, unique_count - 1);
    std::set<std::pair<size_t, size_t>> chosen;
    size_t attempts = 0;
    while (chosen.size() < max_pairs && attempts < max_pairs * 16) {
        size_t a = dist(rng);
        size_t b = dist(rng);
        ++attempts;
        if (a > b)
            std::swap(a, b);
        if (a == b && multiplicity[a] < 2)
            continue;
        chosen.insert({a, b});
    }
    plan.pairs.assign(chosen.begin(), chosen.end());
    return plan;
}

// Walks outward from the slot at `pivot`; a one-sided gap splits the pattern
// and only the fragment adjacent to the slot survives, a gap on both sides is
// dropped and the elements stay contiguous.
inline std::vector<PatternElement> take_adjacent(const Alignment& alignment, size_t pivot,
                                                 bool left) {
    std::vector<PatternElement> out;
    if (left) {
        size_t k = pivot;
        while (k > 0) {
            auto [gx, gy] = alignment.gap_before(k);
            const bool one_sided = (gx > 0) != (gy > 0);
            if (one_sided)
                break;
            --k;
            out.insert(out.begin(), canonical_element(alignment.elements[k].keys));
        }
    } else {
        size_t k = pivot + 1;
        while (k < alignment.elements.size()) {
            auto [gx, gy] = alignment.gap_before(k);
            const bool one_sided = (gx > 0) != (gy > 0);
            if (one_sided)
                break;
            out.push_back(canonical_element(alignment.elements[k].keys));
            ++k;
        }
    }
    return out;
}

}  // namespace detail

/// Pairwise-aligns the contexts (all of one label) and emits the deduplicated
/// context patterns. Pairs whose alignment misses the target slot or is empty
/// contribute nothing.
inline std::vector<ContextPattern> generate_context_patterns(
    const std::vector<GeneralContext>& contexts, const GenerationConfig& cfg) {
    std::vector<const GeneralContext*> unique;
    std::vector<size_t> multiplicity;
    {
        std::map<std::string, size_t> seen;
        for (const GeneralContext& gc : contexts) {
            std::string sig = detail::grid_signature(gc.grid);
            auto [it, inserted] = seen.emplace(std::move(sig), unique.size());
            if (inserted) {
                unique.push_back(&gc);
                multiplicity.push_back(1);
            } else {
                ++multiplicity[it->second];
            }
        }
    }
    const detail::PairPlan plan =
        detail::plan_pairs(unique.size(), multiplicity, cfg.max_pairs, cfg.seed);

    std::vector<std::vector<ContextPattern>> slots(plan.pairs.size());
    detail::parallel_for(plan.pairs.size(), cfg.threads, [&](size_t idx) {
        const auto [a, b] = plan.pairs[idx];
        const Alignment alignment = align(unique[a]->grid, unique[b]->grid, cfg.scoring);
        size_t pivot = alignment.elements.size();
        for (size_t k = 0; k < alignment.elements.size(); ++k)
            for (const ElementKey& key : alignment.elements[k].keys)
                if (key.type == kTargetType) {
                    pivot = k;
                    break;
                }
        if (pivot == alignment.elements.size())
            return;
        ContextPattern p;
        p.label = unique[a]->label;
        p.lc = detail::take_adjacent(alignment, pivot, /*left=*/true);
        p.rc = detail::take_adjacent(alignment, pivot, /*left=*/false);
        if (p.lc.empty() && p.rc.empty())
            return;
        bool boundary_only = true;
        for (const PatternElement& e : p.lc)
            boundary_only = boundary_only && e.boundary_only();
        for (const PatternElement& e : p.rc)
            boundary_only = boundary_only && e.boundary_only();
        if (boundary_only)
            return;
        slots[idx].push_back(std::move(p));
    });

    std::map<std::string, ContextPattern> dedup;
    for (std::vector<ContextPattern>& slot : slots)
        for (ContextPattern& p : slot)
            dedup.emplace(serialize_pattern(p), std::move(p));
    std::vector<ContextPattern> out;
    out.reserve(dedup.size());
    for (auto& [sig, p] : dedup)
        out.push_back(std::move(p));
    return out;
}

/// The grid covered by one target instance, for target-pattern generation.
struct TargetInstance {
    AnnotationGrid grid;
    std::vector<ElementKey> exact_cover_keys;  // keys of annotations covering the full extent
    std::string label;
};

inline std::vector<TargetInstance> extract_target_grids(const std::vector<Document>& corpus,
                                                        const std::string& target_type,
                                                        const KeyDerivationPolicy& policy,
                                                        const AnnotationFilter& include = nullptr) {
    std::vector<TargetInstance> out;
    for (const Document& doc : corpus) {
        for (const Annotation& a : doc.annotations) {
            if (a.type != target_type)
                continue;
            TargetInstance t;
            t.label = target_type;
            t.grid = build_grid(doc, a.start, a.end, policy, include);
            for (const GridElement& e : t.grid.at(0))
                if (e.len == t.grid.length)
                    t.exact_cover_keys.push_back(e.key);
            out.push_back(std::move(t));
        }
    }
    return out;
}

/// Pairwise alignment of target grids plus single-key patterns for
/// annotations that exactly cover a target. Aligned sequences split at every
/// discontinuity; each fragment is a candidate pattern.
inline std::vector<TargetPattern> generate_target_patterns(
    const std::vector<TargetInstance>& targets, const GenerationConfig& cfg) {
    std::vector<const TargetInstance*> unique;
    std::vector<size_t> multiplicity;
    {
        std::map<std::string, size_t> seen;
        for (const TargetInstance& t : targets) {
            std::string sig = detail::grid_signature(t.grid);
            auto [it, inserted] = seen.emplace(std::move(sig), unique.size());
            if (inserted) {
                unique.push_back(&t);
                multiplicity.push_back(1);
            } else {
                ++multiplicity[it->second];
            }
        }
    }
    const detail::PairPlan plan =
        detail::plan_pairs(unique.size(), multiplicity, cfg.max_pairs, cfg.seed);

    std::vector<std::vector<TargetPattern>> slots(plan.pairs.size());
    detail::parallel_for(plan.pairs.size(), cfg.threads, [&](size_t idx) {
        const auto [a, b] = plan.pairs[idx];
        const Alignment alignment = align(unique[a]->grid, unique[b]->grid, cfg.scoring);
        std::vector<PatternElement> fragment;
        auto flush = [&] {
            if (!fragment.empty()) {
                TargetPattern p;
                p.label = unique[a]->label;
                p.elements = fragment;
                slots[idx].push_back(std::move(p));
                fragment.clear();
            }
        };
        for (size_t k = 0; k < alignment.elements.size(); ++k) {
            auto [gx, gy] = alignment.gap_before(k);
            if (gx > 0 || gy > 0)
                flush();
            fragment.push_back(canonical_element(alignment.elements[k].keys));
        }
        flush();
    });

    std::map<std::string, TargetPattern> dedup;
    for (const TargetInstance& t : targets) {
        for (const ElementKey& key : t.exact_cover_keys) {
            TargetPattern p;
            p.label = t.label;
            p.elements = {PatternElement{{key}}};
            dedup.emplace(serialize_pattern(p), std::move(p));
        }
    }
    for (std::vector<TargetPattern>& slot : slots)
        for (TargetPattern& p : slot)
            dedup.emplace(serialize_pattern(p), std::move(p));
    std::vector<TargetPattern> out;
    out.reserve(dedup.size());
    for (auto& [sig, p] : dedup)
        out.push_back(std::move(p));
    return out;
}

}  // namespace alignex
