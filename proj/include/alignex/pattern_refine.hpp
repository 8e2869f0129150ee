#pragma once

// Pattern-target pair refinement: score each pair on training data by its
// precision (the goodness metric), keep pairs above a threshold, drop pairs
// whose every extraction is covered by strictly shorter pairs, and the
// prior-probability machinery that labels high-prior tokens and strips
// low-prior emissions.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"
#include "alignex/parallel.hpp"
#include "alignex/pattern.hpp"
#include "alignex/pattern_engine.hpp"

namespace alignex {

/// (doc, range) extraction footprint of one pair on the training corpus.
using Footprint = std::set<std::tuple<std::string, int, int>>;

struct ScoredPairs {
    std::vector<PatternTargetPair> pairs;
    std::vector<Footprint> footprints;  // parallel to pairs
};

/// Single-pass application of every pair against gold-independent grids.
/// A result is a true positive iff its range and label exactly equal a gold
/// annotation. No fixpoint here: scoring measures a pair on the input
/// annotations alone.
inline ScoredPairs score_pairs(std::vector<PatternTargetPair> pairs,
                               const std::vector<Document>& training,
                               const GridFactory& make_grid, unsigned threads = 0) {
    std::set<std::tuple<std::string, int, int, std::string>> gold;
    for (const Document& doc : training)
        for (const Annotation& a : doc.annotations)
            gold.insert({doc.id, a.start, a.end, a.type});

    std::vector<std::pair<size_t, std::pair<int, int>>> jobs;
    for (size_t d = 0; d < training.size(); ++d)
        for (auto sent : training[d].sentence_ranges())
            jobs.emplace_back(d, sent);

    std::vector<std::vector<MatchResult>> slots(jobs.size());
    detail::parallel_for(jobs.size(), threads, [&](size_t idx) {
        const auto& [d, sent] = jobs[idx];
        const AnnotationGrid grid = make_grid(training[d], sent.first, sent.second);
        for (size_t p = 0; p < pairs.size(); ++p) {
            std::vector<MatchResult> found = apply_pair(pairs[p], grid, p, 0);
            slots[idx].insert(slots[idx].end(), found.begin(), found.end());
        }
    });

    ScoredPairs out;
    out.footprints.assign(pairs.size(), {});
    for (const std::vector<MatchResult>& slot : slots)
        for (const MatchResult& r : slot)
            out.footprints[r.pair_index].insert({r.document_id, r.start, r.end});
    for (size_t p = 0; p < pairs.size(); ++p) {
        PairStats stats;
        for (const auto& [doc, s, e] : out.footprints[p]) {
            ++stats.applications;
            if (gold.count({doc, s, e, pairs[p].label}))
                ++stats.true_positives;
        }
        pairs[p].stats = stats;
    }
    out.pairs = std::move(pairs);
    return out;
}

/// PT': pairs with precision >= threshold and enough applications for the
/// estimate to mean anything. Unevaluable pairs (zero applications) are out.
inline ScoredPairs refine(const ScoredPairs& scored, double threshold, long min_support = 3) {
    ScoredPairs out;
    for (size_t p = 0; p < scored.pairs.size(); ++p) {
        const PairStats& s = scored.pairs[p].stats;
        if (!s.evaluable() || s.applications < min_support || s.precision() < threshold)
            continue;
        out.pairs.push_back(scored.pairs[p]);
        out.footprints.push_back(scored.footprints[p]);
    }
    return out;
}

/// Minimal-set filter: drop a pair when the union of the footprints of
/// strictly shorter surviving pairs covers its entire footprint. Processes
/// longest-first and repeats until stable, which preserves the overall
/// extraction footprint exactly.
inline ScoredPairs filter_subsumed(const ScoredPairs& scored) {
    std::vector<bool> alive(scored.pairs.size(), true);
    std::vector<size_t> order(scored.pairs.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return scored.pairs[a].context_length() > scored.pairs[b].context_length();
    });

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t idx : order) {
            if (!alive[idx])
                continue;
            const size_t len = scored.pairs[idx].context_length();
            Footprint covered;
            for (size_t other = 0; other < scored.pairs.size(); ++other) {
                if (other == idx || !alive[other])
                    continue;
                if (scored.pairs[other].context_length() >= len)
                    continue;
                covered.insert(scored.footprints[other].begin(), scored.footprints[other].end());
            }
            bool subsumed = !scored.footprints[idx].empty();
            for (const auto& hit : scored.footprints[idx])
                if (!covered.count(hit)) {
                    subsumed = false;
                    break;
                }
            if (subsumed) {
                alive[idx] = false;
                changed = true;
            }
        }
    }

    ScoredPairs out;
    for (size_t i = 0; i < scored.pairs.size(); ++i)
        if (alive[i]) {
            out.pairs.push_back(scored.pairs[i]);
            out.footprints.push_back(scored.footprints[i]);
        }
    return out;
}

/// Prior probabilities P(label | token string) estimated from training data.
struct PriorTable {
    struct Entry {
        long total = 0;
        std::map<std::string, long> labeled;  // label -> occurrences under that label
    };
    std::map<std::string, Entry> tokens;  // keyed by lowercased token string

    double prior(const std::string& token, const std::string& label) const {
        auto it = tokens.find(to_lower(token));
        if (it == tokens.end() || it->second.total == 0)
            return -1.0;  // unseen: no prior action
        auto lit = it->second.labeled.find(label);
        const long hits = lit == it->second.labeled.end() ? 0 : lit->second;
        return static_cast<double>(hits) / it->second.total;
    }

    bool seen(const std::string& token) const { return tokens.count(to_lower(token)) > 0; }
};

inline std::string token_string(const Annotation& atom) {
    if (const std::string* s = atom.feature("string"))
        return *s;
    return "";
}

inline PriorTable build_priors(const std::vector<Document>& training,
                               const std::vector<std::string>& labels) {
    PriorTable table;
    for (const Document& doc : training) {
        std::map<std::string, std::vector<std::pair<int, int>>> gold_by_label;
        for (const Annotation& a : doc.annotations)
            for (const std::string& label : labels)
                if (a.type == label)
                    gold_by_label[label].push_back({a.start, a.end});
        for (int i = 0; i < doc.atom_count(); ++i) {
            const std::string tok = to_lower(token_string(doc.atoms[static_cast<size_t>(i)]));
            if (tok.empty())
                continue;
            PriorTable::Entry& entry = table.tokens[tok];
            ++entry.total;
            for (const auto& [label, spans] : gold_by_label)
                for (auto [s, e] : spans)
                    if (i >= s && i < e) {
                        ++entry.labeled[label];
                        break;
                    }
        }
    }
    return table;
}

/// Labels every token whose prior for a label reaches `hi` with that label's
/// emitted type. Runs before the fixpoint so patterns can consume the labels.
inline long apply_high_priors(std::vector<Document>& corpus, const PriorTable& table,
                              double hi, const std::map<std::string, std::string>& emitted_types) {
    long added = 0;
    for (Document& doc : corpus) {
        std::set<std::tuple<int, int, std::string>> existing;
        for (const Annotation& a : doc.annotations)
            existing.insert({a.start, a.end, a.type});
        for (int i = 0; i < doc.atom_count(); ++i) {
            const std::string tok = token_string(doc.atoms[static_cast<size_t>(i)]);
            if (tok.empty())
                continue;
            for (const auto& [label, emitted] : emitted_types) {
                if (table.prior(tok, label) < hi)
                    continue;
                if (!existing.insert({i, i + 1, emitted}).second)
                    continue;
                doc.annotations.push_back({doc.id, i, i + 1, emitted, {}});
                ++added;
            }
        }
    }
    return added;
}

/// Removes system-emitted annotations whose covering tokens all carry a prior
/// <= lo for the annotation's label. Unseen tokens protect an annotation;
/// gold annotations are never touched (only emitted types are considered).
inline long remove_low_priors(std::vector<Document>& corpus, const PriorTable& table, double lo,
                              const std::map<std::string, std::string>& emitted_types) {
    std::map<std::string, std::string> label_of;  // emitted type -> label
    for (const auto& [label, emitted] : emitted_types)
        label_of[emitted] = label;

    long removed = 0;
    for (Document& doc : corpus) {
        std::vector<Annotation> kept;
        kept.reserve(doc.annotations.size());
        for (Annotation& a : doc.annotations) {
            auto it = label_of.find(a.type);
            if (it == label_of.end()) {
                kept.push_back(std::move(a));
                continue;
            }
            bool all_low = true;
            for (int i = a.start; i < a.end; ++i) {
                const std::string tok = token_string(doc.atoms[static_cast<size_t>(i)]);
                const double p = table.prior(tok, it->second);
                if (p < 0 || p > lo) {  // unseen or confidently labeled
                    all_low = false;
                    break;
                }
            }
            if (all_low)
                ++removed;
            else
                kept.push_back(std::move(a));
        }
        doc.annotations = std::move(kept);
    }
    return removed;
}

/// Same-noun person rule: a noun token whose string matches a token inside a
/// person annotation elsewhere in the document is labeled person too.
/// Idempotent: newly labeled tokens contribute no new strings.
inline long propagate_person_labels(Document& doc, const std::string& person_emitted_type) {
    std::set<std::string> person_strings;
    std::set<int> covered;
    for (const Annotation& a : doc.annotations) {
        if (a.type != person_emitted_type)
            continue;
        for (int i = a.start; i < a.end; ++i) {
            covered.insert(i);
            const std::string tok = to_lower(token_string(doc.atoms[static_cast<size_t>(i)]));
            if (!tok.empty())
                person_strings.insert(tok);
        }
    }
    if (person_strings.empty())
        return 0;

    long added = 0;
    for (int i = 0; i < doc.atom_count(); ++i) {
        if (covered.count(i))
            continue;
        const Annotation& atom = doc.atoms[static_cast<size_t>(i)];
        const std::string* category = atom.feature("category");
        if (!category || to_lower(*category).rfind("nn", 0) != 0)
            continue;
        const std::string tok = to_lower(token_string(atom));
        if (tok.empty() || !person_strings.count(tok))
            continue;
        doc.annotations.push_back({doc.id, i, i + 1, person_emitted_type, {}});
        ++added;
    }
    return added;
}

}  // namespace alignex
