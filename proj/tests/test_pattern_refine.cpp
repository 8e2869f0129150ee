#include <catch2/catch_amalgamated.hpp>

#include "alignex/pattern_refine.hpp"
#include "support/corpus_builder.hpp"

using namespace alignex;
using testsupport::DocBuilder;

namespace {

const KeyDerivationPolicy kPolicy = KeyDerivationPolicy::standard();

GridFactory gold_free_factory() {
    return [](const Document& doc, int s, int e) {
        AnnotationGrid g = build_grid(doc, s, e, kPolicy,
                                      [](const Annotation& a) { return a.type != "PER"; });
        return with_sentinels(g, true, true);
    };
}

PatternTargetPair make_pair(const std::string& context, const std::string& target) {
    PatternTargetPair p;
    p.context = parse_context_pattern(context, "PER");
    p.target = parse_target_pattern(target, "PER");
    p.label = "PER";
    p.emitted_type = "i-per";
    return p;
}

Footprint all_hits(const ScoredPairs& scored) {
    Footprint all;
    for (const Footprint& f : scored.footprints)
        all.insert(f.begin(), f.end());
    return all;
}

}  // namespace

TEST_CASE("score_pairs counts applications and exact gold hits") {
    std::vector<Document> corpus;
    for (int d = 0; d < 4; ++d) {
        DocBuilder b("d" + std::to_string(d));
        b.sentence("if/IN Kim/NNP go/VB");
        if (d < 3)
            b.annotate(1, 2, "PER");  // the fourth document has no gold here
        corpus.push_back(b.build());
    }
    const std::vector<PatternTargetPair> pairs = {
        make_pair(":token|string|if :target :token|string|go", ":token|category|nnp"),
        make_pair(":token|string|missing :target", ":token|category|nnp"),
    };
    const ScoredPairs scored = score_pairs(pairs, corpus, gold_free_factory(), 1);

    CHECK(scored.pairs[0].stats.applications == 4);
    CHECK(scored.pairs[0].stats.true_positives == 3);
    CHECK(scored.pairs[0].stats.precision() == 0.75);
    CHECK(scored.footprints[0].size() == 4);

    CHECK_FALSE(scored.pairs[1].stats.evaluable());
    CHECK(refine(scored, 0.5, 1).pairs.size() == 1);  // unevaluable pair excluded
}

TEST_CASE("refine applies the precision threshold and support floor") {
    ScoredPairs scored;
    auto add = [&](long apps, long tps) {
        PatternTargetPair p = make_pair(":start :target", ":token|category|nnp");
        p.stats.applications = apps;
        p.stats.true_positives = tps;
        scored.pairs.push_back(p);
        scored.footprints.push_back({});
    };
    add(20, 20);  // 1.00
    add(25, 24);  // 0.96
    add(50, 47);  // 0.94
    add(2, 2);    // 1.00 but under the support floor
    add(0, 0);    // unevaluable

    const ScoredPairs refined = refine(scored, 0.95, 3);
    REQUIRE(refined.pairs.size() == 2);
    CHECK(refined.pairs[0].stats.applications == 20);
    CHECK(refined.pairs[1].stats.applications == 25);

    SECTION("the retained set shrinks monotonically as the threshold rises") {
        size_t previous = scored.pairs.size() + 1;
        for (double threshold = 0.5; threshold <= 1.0001; threshold += 0.05) {
            const size_t kept = refine(scored, threshold, 1).pairs.size();
            CHECK(kept <= previous);
            previous = kept;
        }
    }
}

TEST_CASE("filter_subsumed drops pairs covered by strictly shorter ones") {
    std::vector<Document> corpus;
    for (int d = 0; d < 3; ++d)
        corpus.push_back(DocBuilder("d" + std::to_string(d))
                             .sentence("a/DT b/NN Kim/NNP go/VB")
                             .annotate(2, 3, "PER")
                             .build());
    corpus.push_back(DocBuilder("extra")
                         .sentence("only/RB b/NN Lee/NNP go/VB stop/VB")
                         .annotate(2, 3, "PER")
                         .build());

    const std::vector<PatternTargetPair> pairs = {
        // len 2: fires on all four documents
        make_pair(":token|string|b :target :token|string|go", ":token|category|nnp"),
        // len 3: fires only on the first three (needs "a" before "b")
        make_pair(":token|string|a :token|string|b :target :token|string|go",
                  ":token|category|nnp"),
        // len 1, lc-only: one unique hit on the extra document
        make_pair(":token|string|only :target",
                  ":token|category|nn :token|category|nnp :token|category|vb "
                  ":token|category|vb"),
    };
    const ScoredPairs scored = score_pairs(pairs, corpus, gold_free_factory(), 1);
    REQUIRE(scored.pairs[0].stats.applications == 4);
    REQUIRE(scored.pairs[1].stats.applications == 3);

    const ScoredPairs minimal = filter_subsumed(scored);
    REQUIRE(minimal.pairs.size() == 2);
    CHECK(minimal.pairs[0].context_length() == 2);
    CHECK(minimal.pairs[1].context_length() == 1);

    SECTION("the extraction footprint is preserved exactly") {
        CHECK(all_hits(minimal) == all_hits(scored));
        // Rerun the surviving pairs from scratch and compare extractions.
        const ScoredPairs rerun = score_pairs(minimal.pairs, corpus, gold_free_factory(), 1);
        CHECK(all_hits(rerun) == all_hits(scored));
    }
    SECTION("a pair with a unique hit survives even when longer pairs exist") {
        bool unique_alive = false;
        for (const PatternTargetPair& p : minimal.pairs)
            unique_alive = unique_alive || serialize_pattern(p.context) ==
                                               ":token|string|only :target";
        CHECK(unique_alive);
    }
}

TEST_CASE("equal-length pairs with identical footprints both survive") {
    std::vector<Document> corpus = {DocBuilder("d")
                                        .sentence("x/NN Kim/NNP y/NN")
                                        .annotate(1, 2, "PER")
                                        .build()};
    const std::vector<PatternTargetPair> pairs = {
        make_pair(":token|string|x :target", ":token|category|nnp"),
        make_pair(":target :token|string|y", ":token|category|nnp"),
    };
    ScoredPairs scored = score_pairs(pairs, corpus, gold_free_factory(), 1);
    const ScoredPairs minimal = filter_subsumed(scored);
    CHECK(minimal.pairs.size() == 2);
}

TEST_CASE("prior table construction and application") {
    std::vector<Document> training;
    {
        // "smith" appears 10 times, 9 inside gold PER; "acme" never labeled.
        DocBuilder b("train");
        for (int i = 0; i < 10; ++i)
            b.sentence("Smith/NNP acme/NNP met/VBD");
        for (int i = 0; i < 9; ++i)
            b.annotate(i * 3, i * 3 + 1, "PER");
        training.push_back(b.build());
    }
    const PriorTable table = build_priors(training, {"PER", "ORG"});
    CHECK(table.prior("smith", "PER") == 0.9);
    CHECK(table.prior("Smith", "PER") == 0.9);  // case-insensitive
    CHECK(table.prior("acme", "PER") == 0.0);
    CHECK(table.prior("unseen", "PER") == -1.0);

    const std::map<std::string, std::string> emitted = {{"PER", "i-per"}};

    SECTION("high priors add labels") {
        std::vector<Document> corpus = {
            DocBuilder("t").sentence("Smith/NNP spoke/VBD novel/NN").build()};
        const long added = apply_high_priors(corpus, table, 0.9, emitted);
        CHECK(added == 1);
        REQUIRE(corpus[0].annotations.size() == 1);
        CHECK(corpus[0].annotations[0].type == "i-per");
        CHECK(corpus[0].annotations[0].start == 0);

        // Idempotent: the annotation already exists.
        CHECK(apply_high_priors(corpus, table, 0.9, emitted) == 0);
    }
    SECTION("low priors remove only emitted annotations") {
        std::vector<Document> corpus = {DocBuilder("t")
                                            .sentence("acme/NNP Smith/NNP novel/NN")
                                            .annotate(0, 1, "i-per")   // acme: prior 0.0
                                            .annotate(1, 2, "i-per")   // smith: prior 0.9
                                            .annotate(2, 3, "i-per")   // novel: unseen
                                            .annotate(0, 1, "PER")     // gold stays
                                            .build()};
        const long removed = remove_low_priors(corpus, table, 0.1, emitted);
        CHECK(removed == 1);
        std::multiset<std::string> kinds;
        for (const Annotation& a : corpus[0].annotations)
            kinds.insert(a.type + "@" + std::to_string(a.start));
        CHECK(kinds == std::multiset<std::string>{"PER@0", "i-per@1", "i-per@2"});
    }
}

TEST_CASE("same-noun person propagation") {
    SECTION("a matching noun elsewhere in the document is labeled") {
        Document doc = DocBuilder("d")
                           .sentence("Mark/NNP Smith/NNP spoke/VBD")
                           .sentence("later/RB smith/NN agreed/VBD")
                           .sentence("but/CC smith/VBD disagreed/VBD")  // not a noun here
                           .annotate(0, 2, "i-per")
                           .build();
        const long added = propagate_person_labels(doc, "i-per");
        CHECK(added == 1);
        bool labeled = false;
        for (const Annotation& a : doc.annotations)
            labeled = labeled || (a.start == 4 && a.end == 5 && a.type == "i-per");
        CHECK(labeled);
        for (const Annotation& a : doc.annotations)
            CHECK(a.start != 7);  // the verb reading stays unlabeled

        SECTION("propagation is idempotent") {
            CHECK(propagate_person_labels(doc, "i-per") == 0);
        }
    }
    SECTION("documents without person annotations are untouched") {
        Document doc = DocBuilder("d").sentence("smith/NN works/VBZ").build();
        CHECK(propagate_person_labels(doc, "i-per") == 0);
        CHECK(doc.annotations.empty());
    }
}
