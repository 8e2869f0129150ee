// Command line surface: train / apply / eval / patterns plus the alignment
// matrix dump and the shared-task reproduction harness.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "alignex/conll.hpp"
#include "alignex/pipeline.hpp"

using namespace alignex;

namespace {

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::vector<Document> read_corpus_file(const std::string& path, const std::string& format,
                                       const PipelineConfig& cfg) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open corpus file " + path);
    if (format == "conll") {
        ConllResult result = read_conll(in, file_stem(path));
        if (result.lenient_i_tags)
            std::cerr << path << ": " << result.lenient_i_tags
                      << " I- tags opened entities leniently\n";
        return std::move(result.documents);
    }
    return read_annotation_records(in, {cfg.atomic_type, cfg.sentence_type});
}

std::vector<Document> read_corpus_files(const std::vector<std::string>& paths,
                                        const std::string& format, const PipelineConfig& cfg) {
    std::vector<Document> corpus;
    for (const std::string& path : paths) {
        std::vector<Document> docs = read_corpus_file(path, format, cfg);
        corpus.insert(corpus.end(), std::make_move_iterator(docs.begin()),
                      std::make_move_iterator(docs.end()));
    }
    return corpus;
}

/// Extra annotation records merged into already-loaded documents by id
/// (external Lookup/Date/Number layers for the reproduction harness).
void merge_annotation_layers(std::vector<Document>& corpus,
                             const std::vector<std::string>& paths) {
    std::map<std::string, Document*> by_id;
    for (Document& doc : corpus)
        by_id[doc.id] = &doc;
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open annotation file " + path);
        std::string line;
        size_t line_no = 0;
        long merged = 0, orphaned = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#')
                continue;
            Annotation a = parse_record(line, line_no);
            auto it = by_id.find(a.document_id);
            if (it == by_id.end()) {
                ++orphaned;
                continue;
            }
            it->second->annotations.push_back(std::move(a));
            ++merged;
        }
        std::cerr << path << ": merged " << merged << " annotations";
        if (orphaned)
            std::cerr << " (" << orphaned << " referenced unknown documents)";
        std::cerr << "\n";
    }
}

PipelineConfig load_config_or_default(const std::string& path) {
    if (path.empty())
        return PipelineConfig{};
    return load_config(path);
}

int run_train(const std::vector<std::string>& corpus_files, const std::string& format,
              const std::string& config_path, const std::string& out_patterns,
              const std::string& out_stats, const std::string& out_priors) {
    const PipelineConfig cfg = load_config_or_default(config_path);
    const std::vector<Document> corpus = read_corpus_files(corpus_files, format, cfg);
    std::cerr << "training on " << corpus.size() << " documents\n";
    const TrainOutput result = train(corpus, cfg);
    std::cerr << "candidate pairs: " << result.candidate_pairs
              << ", evaluable: " << result.scored_evaluable
              << ", retained after refine+filter: " << result.pairs.size() << "\n";
    if (result.skipped_cross_sentence)
        std::cerr << "skipped " << result.skipped_cross_sentence
                  << " cross-sentence targets\n";

    std::ofstream pat(out_patterns);
    if (!pat)
        throw std::runtime_error("cannot write " + out_patterns);
    write_pattern_file(pat, result.pairs);
    if (!out_stats.empty()) {
        std::ofstream stats(out_stats);
        write_stats_file(stats, result.pairs);
    }
    if (!out_priors.empty()) {
        std::ofstream priors(out_priors);
        write_priors_file(priors, result.priors);
    }
    return 0;
}

int run_apply(const std::string& corpus_file, const std::string& format,
              const std::string& patterns_file, const std::string& priors_file,
              const std::string& config_path, const std::string& out_file, bool patterns_only) {
    const PipelineConfig cfg = load_config_or_default(config_path);
    std::vector<Document> corpus = read_corpus_files({corpus_file}, format, cfg);

    std::ifstream pat(patterns_file);
    if (!pat)
        throw std::runtime_error("cannot open patterns file " + patterns_file);
    const std::vector<PatternTargetPair> pairs = read_pattern_file(pat, cfg);

    PriorTable priors;
    if (!priors_file.empty()) {
        std::ifstream in(priors_file);
        if (!in)
            throw std::runtime_error("cannot open priors file " + priors_file);
        priors = read_priors_file(in);
    }
    ApplyOptions options;
    options.patterns_only = patterns_only || priors_file.empty();

    const ApplySummary summary = apply_patterns(corpus, pairs, priors, cfg, options);
    std::cerr << "fixpoint in " << summary.fixpoint.iterations << " iterations, added "
              << summary.fixpoint.annotations_added << " annotations";
    if (!options.patterns_only)
        std::cerr << "; priors +" << summary.prior_added << "/-" << summary.prior_removed
                  << ", propagated " << summary.propagated;
    std::cerr << "\n";

    std::ofstream out(out_file);
    if (!out)
        throw std::runtime_error("cannot write " + out_file);
    write_annotation_records(out, corpus, {cfg.atomic_type, cfg.sentence_type});
    return 0;
}

int run_eval(const std::string& system_file, const std::string& gold_file,
             const std::string& gold_format, const std::string& config_path,
             const std::string& out_records, const std::string& patterns_only_file) {
    const PipelineConfig cfg = load_config_or_default(config_path);
    const std::vector<Document> gold_docs = read_corpus_files({gold_file}, gold_format, cfg);
    const std::vector<Entity> gold = gold_entities(gold_docs, cfg.targets);

    std::ofstream records;
    if (!out_records.empty()) {
        records.open(out_records);
        if (!records)
            throw std::runtime_error("cannot write " + out_records);
    }

    auto eval_one = [&](const std::string& path, const std::string& variant) {
        const std::vector<Document> sys_docs = read_corpus_files({path}, "records", cfg);
        const EvalReport report = evaluate(system_entities(sys_docs, cfg), gold);
        std::cout << format_report(report, variant) << "\n";
        if (records.is_open())
            write_report_records(records, report, variant);
    };
    eval_one(system_file, patterns_only_file.empty() ? "system" : "full pipeline");
    if (!patterns_only_file.empty())
        eval_one(patterns_only_file, "patterns only");
    return 0;
}

int run_patterns(const std::string& patterns_file, const std::string& stats_file,
                 const std::string& label, long top, const std::string& sort_key) {
    const PipelineConfig cfg;
    std::ifstream pat(patterns_file);
    if (!pat)
        throw std::runtime_error("cannot open patterns file " + patterns_file);
    std::vector<PatternTargetPair> pairs = read_pattern_file(pat, cfg);
    if (!stats_file.empty()) {
        std::ifstream stats(stats_file);
        if (!stats)
            throw std::runtime_error("cannot open stats file " + stats_file);
        read_stats_file(stats, pairs);
    }
    if (!label.empty())
        std::erase_if(pairs, [&](const PatternTargetPair& p) { return p.label != label; });
    std::stable_sort(pairs.begin(), pairs.end(),
                     [&](const PatternTargetPair& a, const PatternTargetPair& b) {
                         if (sort_key == "precision")
                             return a.stats.precision() > b.stats.precision();
                         return a.stats.applications > b.stats.applications;
                     });
    if (top > 0 && static_cast<size_t>(top) < pairs.size())
        pairs.resize(static_cast<size_t>(top));
    for (const PatternTargetPair& p : pairs) {
        std::cout << serialize_pattern(p.context) << '\t' << serialize_pattern(p.target) << '\t'
                  << p.label << '\t' << p.stats.applications;
        if (!stats_file.empty())
            std::cout << '\t' << std::fixed << std::setprecision(3) << p.stats.precision();
        std::cout << '\n';
    }
    return 0;
}

int run_matrix(const std::string& x_text, const std::string& y_text, double match,
               double mismatch, double gap) {
    auto tokens_to_grid = [](const std::string& text) {
        AnnotationGrid g;
        std::istringstream is(text);
        std::string tok;
        std::vector<std::string> toks;
        while (is >> tok)
            toks.push_back(tok);
        g.length = static_cast<int>(toks.size());
        g.starts.resize(toks.size());
        g.document_id = "cli";
        for (size_t i = 0; i < toks.size(); ++i)
            g.add(static_cast<int>(i),
                  {{"t", "string", to_lower(toks[i])}, 1, ElementSource::Atom,
                   static_cast<int>(i)});
        return g;
    };
    ScoringConfig cfg;
    cfg.default_match = match;
    cfg.target_match = std::max(match, cfg.target_match);
    cfg.mismatch = mismatch;
    cfg.gap_penalty = gap;
    const AlignmentResult result = align_full(tokens_to_grid(x_text), tokens_to_grid(y_text), cfg);
    std::cout << dump_matrix(result.matrix);
    std::cout << "score: " << result.alignment.score << "\nalignment:";
    for (size_t k = 0; k < result.alignment.elements.size(); ++k) {
        const auto [gx, gy] = result.alignment.gap_before(k);
        if (gx || gy)
            std::cout << " [gap]";
        const AlignedElement& e = result.alignment.elements[k];
        std::cout << ' ' << (e.keys.empty() ? "?" : e.keys[0].value);
    }
    std::cout << "\n";
    return 0;
}

int run_reproduce(const std::string& train_file, const std::string& testa_file,
                  const std::string& testb_file, const std::vector<std::string>& extra,
                  const std::string& config_path, const std::string& out_patterns) {
    const PipelineConfig cfg = load_config_or_default(config_path);

    std::vector<Document> training = read_corpus_files({train_file}, "conll", cfg);
    if (!testa_file.empty()) {
        std::vector<Document> testa = read_corpus_files({testa_file}, "conll", cfg);
        training.insert(training.end(), std::make_move_iterator(testa.begin()),
                        std::make_move_iterator(testa.end()));
    }
    std::vector<Document> testb = read_corpus_files({testb_file}, "conll", cfg);
    if (!extra.empty()) {
        merge_annotation_layers(training, extra);
        merge_annotation_layers(testb, extra);
    }

    std::cerr << "training on " << training.size() << " documents\n";
    const TrainOutput trained = train(training, cfg);
    std::cerr << "retained " << trained.pairs.size() << " pattern-target pairs\n";
    if (!out_patterns.empty()) {
        std::ofstream out(out_patterns);
        write_pattern_file(out, trained.pairs);
    }

    const std::vector<Entity> gold = gold_entities(testb, cfg.targets);
    apply_patterns(testb, trained.pairs, trained.priors, cfg, {});
    const EvalReport report = evaluate(system_entities(testb, cfg), gold);
    std::cout << format_report(report, "held-out evaluation") << "\n";

    const std::map<std::string, double> reference = {
        {"PER", 0.914}, {"ORG", 0.802}, {"LOC", 0.872}};
    std::cout << "reference comparison (entity F1, informational):\n";
    for (const auto& [label, target] : reference) {
        auto it = report.labels.find(label);
        const double f1 = it == report.labels.end() ? 0.0 : it->second.entity.f1();
        const double delta = f1 - target;
        std::cout << "  " << label << ": " << std::fixed << std::setprecision(3) << f1
                  << " vs " << target << " (delta " << std::showpos << delta << std::noshowpos
                  << (std::abs(delta) > 0.05 ? ", exceeds 0.05" : "") << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grid-alignment pattern extraction pipeline"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "generate, score and refine patterns");
    std::vector<std::string> train_corpus;
    std::string train_format = "records", train_config, train_out = "patterns.tsv";
    std::string train_stats, train_priors;
    train_cmd->add_option("--corpus", train_corpus, "training corpus file(s)")->required();
    train_cmd->add_option("--format", train_format, "corpus format: records|conll")
        ->check(CLI::IsMember({"records", "conll"}));
    train_cmd->add_option("--config", train_config, "pipeline config file");
    train_cmd->add_option("--out-patterns", train_out, "pattern file to write");
    train_cmd->add_option("--out-stats", train_stats, "stats side-file to write");
    train_cmd->add_option("--out-priors", train_priors, "prior table to write");

    // apply
    auto* apply_cmd = app.add_subcommand("apply", "apply patterns to a corpus");
    std::string apply_corpus, apply_format = "records", apply_patterns_file, apply_priors;
    std::string apply_config, apply_out = "applied.ann";
    bool apply_patterns_only = false;
    apply_cmd->add_option("--corpus", apply_corpus, "corpus file")->required();
    apply_cmd->add_option("--format", apply_format, "corpus format: records|conll")
        ->check(CLI::IsMember({"records", "conll"}));
    apply_cmd->add_option("--patterns", apply_patterns_file, "pattern file")->required();
    apply_cmd->add_option("--priors", apply_priors, "prior table file");
    apply_cmd->add_option("--config", apply_config, "pipeline config file");
    apply_cmd->add_option("--out", apply_out, "annotation records to write");
    apply_cmd->add_flag("--patterns-only", apply_patterns_only,
                        "skip prior labeling/removal and propagation");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "entity/token-level scoring");
    std::string eval_system, eval_gold, eval_gold_format = "records", eval_config;
    std::string eval_out, eval_patterns_only;
    eval_cmd->add_option("--system", eval_system, "system output (annotation records)")
        ->required();
    eval_cmd->add_option("--gold", eval_gold, "gold corpus")->required();
    eval_cmd->add_option("--gold-format", eval_gold_format, "gold format: records|conll")
        ->check(CLI::IsMember({"records", "conll"}));
    eval_cmd->add_option("--config", eval_config, "pipeline config file");
    eval_cmd->add_option("--out", eval_out, "machine-readable report records");
    eval_cmd->add_option("--patterns-only-system", eval_patterns_only,
                         "second system output for the patterns-only breakdown");

    // patterns
    auto* patterns_cmd = app.add_subcommand("patterns", "list stored pattern-target pairs");
    std::string list_patterns, list_stats, list_label, list_sort = "count";
    long list_top = 0;
    patterns_cmd->add_option("--patterns", list_patterns, "pattern file")->required();
    patterns_cmd->add_option("--stats", list_stats, "stats side-file");
    patterns_cmd->add_option("--label", list_label, "filter by label");
    patterns_cmd->add_option("--top", list_top, "keep the top N");
    patterns_cmd->add_option("--sort", list_sort, "sort key: count|precision")
        ->check(CLI::IsMember({"count", "precision"}));

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "debug-dump an alignment matrix");
    std::string matrix_x, matrix_y;
    double matrix_match = 1, matrix_mismatch = -1, matrix_gap = 0;
    matrix_cmd->add_option("--x", matrix_x, "space-separated atoms of X")->required();
    matrix_cmd->add_option("--y", matrix_y, "space-separated atoms of Y")->required();
    matrix_cmd->add_option("--match", matrix_match, "match score");
    matrix_cmd->add_option("--mismatch", matrix_mismatch, "mismatch score");
    matrix_cmd->add_option("--gap", matrix_gap, "gap penalty");

    // reproduce
    auto* repro_cmd = app.add_subcommand(
        "reproduce", "shared-task harness: train on train(+testa), evaluate on testb");
    std::string repro_train, repro_testa, repro_testb, repro_config, repro_out;
    std::vector<std::string> repro_extra;
    repro_cmd->add_option("--train", repro_train, "training corpus (conll)")->required();
    repro_cmd->add_option("--testa", repro_testa, "development corpus (conll)");
    repro_cmd->add_option("--testb", repro_testb, "evaluation corpus (conll)")->required();
    repro_cmd->add_option("--annotations", repro_extra,
                          "extra annotation-record layers (Lookup/Date/Number), doc ids "
                          "matching <stem>-<n>");
    repro_cmd->add_option("--config", repro_config, "pipeline config file");
    repro_cmd->add_option("--out-patterns", repro_out, "pattern file to write");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed())
            return run_train(train_corpus, train_format, train_config, train_out, train_stats,
                             train_priors);
        if (apply_cmd->parsed())
            return run_apply(apply_corpus, apply_format, apply_patterns_file, apply_priors,
                             apply_config, apply_out, apply_patterns_only);
        if (eval_cmd->parsed())
            return run_eval(eval_system, eval_gold, eval_gold_format, eval_config, eval_out,
                            eval_patterns_only);
        if (patterns_cmd->parsed())
            return run_patterns(list_patterns, list_stats, list_label, list_top, list_sort);
        if (matrix_cmd->parsed())
            return run_matrix(matrix_x, matrix_y, matrix_match, matrix_mismatch, matrix_gap);
        if (repro_cmd->parsed())
            return run_reproduce(repro_train, repro_testa, repro_testb, repro_extra, repro_config,
                                 repro_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
