#pragma once

// Train/apply orchestration on top of the generation, engine and refinement
// modules, plus the on-disk formats for pattern-target pairs, their stats and
// the prior table.
//
// Pattern file, one pair per line:
//   context-pattern <TAB> target-pattern <TAB> label <TAB> count
// Stats side-file, keyed by line index into the pattern file:
//   id <TAB> applications <TAB> true_positives <TAB> precision
// Priors file, one token per line:
//   token <TAB> total <TAB> label:count[,label:count...]

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "alignex/config.hpp"
#include "alignex/eval.hpp"
#include "alignex/pattern_engine.hpp"
#include "alignex/pattern_gen.hpp"
#include "alignex/pattern_refine.hpp"
#include "alignex/records.hpp"

namespace alignex {

inline GridFactory make_grid_factory(PipelineConfig cfg) {
    return [cfg = std::move(cfg)](const Document& doc, int s, int e) {
        AnnotationGrid grid = build_grid(doc, s, e, cfg.key_policy, cfg.grid_filter());
        return with_sentinels(grid, true, true);
    };
}

struct TrainOutput {
    std::vector<PatternTargetPair> pairs;  // refined + subsumption-filtered, with stats
    PriorTable priors;
    long candidate_pairs = 0;
    long scored_evaluable = 0;
    int skipped_cross_sentence = 0;
};

/// Generation, scoring, refinement and subsumption filtering over a training
/// corpus with gold target annotations.
inline TrainOutput train(const std::vector<Document>& corpus, const PipelineConfig& cfg) {
    TrainOutput out;
    GenerationConfig gen;
    gen.scoring = cfg.scoring;
    gen.token_window = cfg.token_window;
    gen.max_pairs = cfg.max_pairs;
    gen.seed = cfg.seed;
    gen.threads = cfg.threads;
    const AnnotationFilter filter = cfg.grid_filter();

    std::vector<PatternTargetPair> candidates;
    for (const std::string& label : cfg.targets) {
        ContextExtraction extraction =
            extract_general_contexts(corpus, label, cfg.key_policy, gen, filter);
        out.skipped_cross_sentence += extraction.skipped_cross_sentence;
        const std::vector<ContextPattern> contexts =
            generate_context_patterns(extraction.contexts, gen);
        const std::vector<TargetInstance> instances =
            extract_target_grids(corpus, label, cfg.key_policy, filter);
        const std::vector<TargetPattern> target_patterns =
            generate_target_patterns(instances, gen);
        for (const ContextPattern& p : contexts)
            for (const TargetPattern& t : target_patterns)
                candidates.push_back({p, t, label, cfg.emitted_type(label), {}});
    }
    out.candidate_pairs = static_cast<long>(candidates.size());

    ScoredPairs scored =
        score_pairs(std::move(candidates), corpus, make_grid_factory(cfg), cfg.threads);
    for (const PatternTargetPair& p : scored.pairs)
        if (p.stats.evaluable())
            ++out.scored_evaluable;
    ScoredPairs refined = refine(scored, cfg.precision_threshold, cfg.min_support);
    ScoredPairs minimal = filter_subsumed(refined);
    out.pairs = std::move(minimal.pairs);
    out.priors = build_priors(corpus, cfg.targets);
    return out;
}

struct ApplyOptions {
    bool patterns_only = false;  // skip prior labeling/removal and propagation
};

struct ApplySummary {
    FixpointSummary fixpoint;
    long prior_added = 0;
    long prior_removed = 0;
    long propagated = 0;
};

/// High-prior labeling, fixpoint pattern application, low-prior removal and
/// same-noun person propagation, in that order. Mutates the corpus by adding
/// (and possibly removing) system annotations of the emitted types.
inline ApplySummary apply_patterns(std::vector<Document>& corpus,
                                   const std::vector<PatternTargetPair>& pairs,
                                   const PriorTable& priors, const PipelineConfig& cfg,
                                   const ApplyOptions& options = {}) {
    ApplySummary summary;
    const auto emitted = cfg.emitted_types();
    if (!options.patterns_only)
        summary.prior_added = apply_high_priors(corpus, priors, cfg.prior_hi, emitted);
    FixpointConfig fix;
    fix.max_iterations = cfg.max_iterations;
    fix.threads = cfg.threads;
    summary.fixpoint = run_to_fixpoint(pairs, corpus, make_grid_factory(cfg), fix);
    if (!options.patterns_only) {
        summary.prior_removed = remove_low_priors(corpus, priors, cfg.prior_lo, emitted);
        if (!cfg.person_label.empty() && emitted.count(cfg.person_label)) {
            const std::string person_type = cfg.emitted_type(cfg.person_label);
            for (Document& doc : corpus)
                summary.propagated += propagate_person_labels(doc, person_type);
        }
    }
    return summary;
}

inline std::vector<Entity> gold_entities(const std::vector<Document>& corpus,
                                         const std::vector<std::string>& labels) {
    std::vector<Entity> out;
    for (const Document& doc : corpus)
        for (const Annotation& a : doc.annotations)
            for (const std::string& label : labels)
                if (a.type == label)
                    out.push_back({doc.id, a.start, a.end, label});
    return out;
}

/// System annotations (emitted types) mapped back to their labels and
/// projected to maximal coverage runs per label: overlapping or adjacent
/// emissions of one label read as a single entity, the way token-level tags
/// project to entities in column formats. Runs never cross a sentence
/// boundary.
inline std::vector<Entity> system_entities(const std::vector<Document>& corpus,
                                           const PipelineConfig& cfg) {
    std::vector<Entity> out;
    for (const Document& doc : corpus) {
        std::set<int> sentence_starts;
        for (auto [s, e] : doc.sentence_ranges())
            sentence_starts.insert(s);
        std::map<std::string, std::vector<bool>> covered;
        for (const Annotation& a : doc.annotations) {
            const std::string label = cfg.label_of_emitted(a.type);
            if (label.empty())
                continue;
            auto& mask = covered[label];
            if (mask.empty())
                mask.assign(static_cast<size_t>(doc.atom_count()), false);
            for (int i = a.start; i < a.end; ++i)
                mask[static_cast<size_t>(i)] = true;
        }
        for (const auto& [label, mask] : covered) {
            int run_start = -1;
            for (int i = 0; i <= static_cast<int>(mask.size()); ++i) {
                const bool on = i < static_cast<int>(mask.size()) && mask[static_cast<size_t>(i)];
                if (on && run_start >= 0 && sentence_starts.count(i)) {
                    out.push_back({doc.id, run_start, i, label});
                    run_start = i;
                }
                if (on && run_start < 0)
                    run_start = i;
                if (!on && run_start >= 0) {
                    out.push_back({doc.id, run_start, i, label});
                    run_start = -1;
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pattern / stats / priors files

inline void write_pattern_file(std::ostream& out, const std::vector<PatternTargetPair>& pairs) {
    for (const PatternTargetPair& p : pairs)
        out << serialize_pattern(p.context) << '\t' << serialize_pattern(p.target) << '\t'
            << p.label << '\t' << p.stats.applications << '\n';
}

inline std::vector<PatternTargetPair> read_pattern_file(std::istream& in,
                                                        const PipelineConfig& cfg) {
    std::vector<PatternTargetPair> pairs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> fields;
        std::istringstream is(line);
        std::string field;
        while (std::getline(is, field, '\t'))
            fields.push_back(field);
        if (fields.size() < 3)
            throw std::runtime_error("pattern file line " + std::to_string(line_no) +
                                     ": expected context<TAB>target<TAB>label[<TAB>count]");
        PatternTargetPair pair;
        try {
            pair.context = parse_context_pattern(fields[0], fields[2]);
            pair.target = parse_target_pattern(fields[1], fields[2]);
        } catch (const PatternParseError& e) {
            throw std::runtime_error("pattern file line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        pair.label = fields[2];
        pair.emitted_type = cfg.emitted_type(fields[2]);
        if (fields.size() >= 4 && !fields[3].empty()) {
            try {
                pair.stats.applications = std::stol(fields[3]);
            } catch (const std::exception&) {
                throw std::runtime_error("pattern file line " + std::to_string(line_no) +
                                         ": count is not an integer");
            }
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

inline void write_stats_file(std::ostream& out, const std::vector<PatternTargetPair>& pairs) {
    for (size_t i = 0; i < pairs.size(); ++i) {
        const PairStats& s = pairs[i].stats;
        out << i << '\t' << s.applications << '\t' << s.true_positives << '\t' << s.precision()
            << '\n';
    }
}

inline void read_stats_file(std::istream& in, std::vector<PatternTargetPair>& pairs) {
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream is(line);
        size_t id;
        long applications, tps;
        if (!(is >> id >> applications >> tps) || id >= pairs.size())
            throw std::runtime_error("stats file line " + std::to_string(line_no) +
                                     ": bad record");
        pairs[id].stats.applications = applications;
        pairs[id].stats.true_positives = tps;
    }
}

inline void write_priors_file(std::ostream& out, const PriorTable& table) {
    for (const auto& [token, entry] : table.tokens) {
        out << detail::escape_field(token) << '\t' << entry.total << '\t';
        bool first = true;
        for (const auto& [label, count] : entry.labeled) {
            if (!first)
                out << ',';
            out << label << ':' << count;
            first = false;
        }
        out << '\n';
    }
}

inline PriorTable read_priors_file(std::istream& in) {
    PriorTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const std::vector<std::string> fields = detail::split_tabs(line);
        if (fields.size() < 2)
            throw std::runtime_error("priors file line " + std::to_string(line_no) +
                                     ": bad record");
        PriorTable::Entry entry;
        entry.total = std::stol(fields[1]);
        if (fields.size() >= 3 && !fields[2].empty()) {
            std::istringstream is(fields[2]);
            std::string item;
            while (std::getline(is, item, ',')) {
                const size_t colon = item.rfind(':');
                if (colon == std::string::npos)
                    throw std::runtime_error("priors file line " + std::to_string(line_no) +
                                             ": bad label:count entry");
                entry.labeled[item.substr(0, colon)] = std::stol(item.substr(colon + 1));
            }
        }
        table.tokens[detail::unescape_field(fields[0])] = std::move(entry);
    }
    return table;
}

}  // namespace alignex
