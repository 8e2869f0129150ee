#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "alignex/config.hpp"
#include "alignex/conll.hpp"
#include "alignex/eval.hpp"
#include "alignex/records.hpp"
#include "support/corpus_builder.hpp"

using namespace alignex;
using testsupport::DocBuilder;

TEST_CASE("annotation records round-trip through write and read") {
    std::vector<Document> corpus;
    corpus.push_back(DocBuilder("doc one")  // spaces in ids are fine, tabs get escaped
                         .sentence("Hello/UH there/RB")
                         .sentence("Bye/UH now/RB")
                         .annotate(0, 2, "Greeting", {{"tone", "warm"}, {"odd=name", "a\tb"}})
                         .lookup(2, 3, "farewell")
                         .build());
    corpus.push_back(DocBuilder("doc2").sentence("Solo/NNP").annotate(0, 1, "PER").build());

    std::stringstream buffer;
    write_annotation_records(buffer, corpus);
    const std::vector<Document> back = read_annotation_records(buffer);

    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "doc one");
    CHECK(back[0].atom_count() == 4);
    CHECK(back[0].sentences == corpus[0].sentences);
    REQUIRE(back[0].annotations.size() == 2);
    const Annotation* greeting = nullptr;
    for (const Annotation& a : back[0].annotations)
        if (a.type == "Greeting")
            greeting = &a;
    REQUIRE(greeting);
    CHECK(greeting->features.at("tone") == "warm");
    CHECK(greeting->features.at("odd=name") == "a\tb");
    CHECK(back[0].atoms[0].features.at("string") == "Hello");

    SECTION("a second write is byte-identical") {
        std::stringstream first, second;
        write_annotation_records(first, corpus);
        write_annotation_records(second, back);
        CHECK(first.str() == second.str());
    }
}

TEST_CASE("annotation record errors carry line numbers") {
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_annotation_records(in);
    };
    CHECK_THROWS_WITH(read("d\t0\t1\n"), Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(read("# ok\nd\tx\t1\tT\n"), Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(read("d\t0\t1\tToken\tnovalue\n"),
                      Catch::Matchers::ContainsSubstring("without '='"));
    CHECK_THROWS_WITH(read("d\t0\t2\tToken\tstring=x\n"),
                      Catch::Matchers::ContainsSubstring("length 1"));
}

TEST_CASE("conll ingestion") {
    SECTION("a B/I run becomes one gold annotation") {
        std::istringstream in("U.N. NNP I-NP I-ORG\nofficial NN I-NP O\n");
        const ConllResult result = read_conll(in, "t");
        REQUIRE(result.documents.size() == 1);
        const Document& doc = result.documents[0];
        CHECK(doc.atom_count() == 2);
        REQUIRE(doc.annotations.size() == 1);
        CHECK(doc.annotations[0].type == "ORG");
        CHECK(doc.annotations[0].start == 0);
        CHECK(doc.annotations[0].end == 1);
        CHECK(result.lenient_i_tags == 1);  // the leading I-ORG opened leniently
        CHECK(doc.atoms[0].features.at("string") == "U.N.");
        CHECK(doc.atoms[0].features.at("category") == "NNP");
        CHECK(doc.atoms[0].features.at("chunk") == "I-NP");
    }
    SECTION("empty input yields no documents") {
        std::istringstream in("");
        CHECK(read_conll(in).documents.empty());
    }
    SECTION("three document markers yield three documents") {
        std::istringstream in(
            "-DOCSTART- -X- -X- O\n\na NN B-LOC\n\n"
            "-DOCSTART- -X- -X- O\n\nb NN O\n\n"
            "-DOCSTART- -X- -X- O\n\nc NN O\nd NN B-PER\nd2 NN I-PER\n\n");
        const ConllResult result = read_conll(in, "x");
        REQUIRE(result.documents.size() == 3);
        CHECK(result.documents[0].id == "x-1");
        CHECK(result.documents[2].id == "x-3");
        CHECK(result.documents[0].annotations.size() == 1);
        REQUIRE(result.documents[2].annotations.size() == 1);
        CHECK(result.documents[2].annotations[0].start == 1);
        CHECK(result.documents[2].annotations[0].end == 3);
        CHECK(result.lenient_i_tags == 0);
    }
    SECTION("adjacent entities split by B- tags") {
        std::istringstream in("a NNP I-PER\nb NNP B-PER\n\n");
        const ConllResult result = read_conll(in);
        REQUIRE(result.documents.size() == 1);
        REQUIRE(result.documents[0].annotations.size() == 2);
    }
    SECTION("malformed lines are errors with line numbers") {
        std::istringstream one_col("word\n");
        CHECK_THROWS_WITH(read_conll(one_col), Catch::Matchers::ContainsSubstring("line 1"));
        std::istringstream bad_tag("word NN X-ORG\n");
        CHECK_THROWS_WITH(read_conll(bad_tag), Catch::Matchers::ContainsSubstring("X-ORG"));
    }
    SECTION("re-emission preserves tokens, sentences and the gold entity set") {
        std::istringstream in(
            "-DOCSTART- -X- -X- O\n\n"
            "Essex NNP I-NP I-ORG\nplayed VBD I-VP O\nat IN I-PP O\nLeeds NNP I-NP I-LOC\n\n"
            "Smith NNP I-NP I-PER\nscored VBD I-VP O\n\n");
        const ConllResult first = read_conll(in, "r");
        std::stringstream out;
        write_conll(out, first.documents, {"PER", "ORG", "LOC"});
        const ConllResult second = read_conll(out, "r");

        REQUIRE(second.documents.size() == first.documents.size());
        for (size_t d = 0; d < first.documents.size(); ++d) {
            CHECK(second.documents[d].atom_count() == first.documents[d].atom_count());
            CHECK(second.documents[d].sentences == first.documents[d].sentences);
            auto gold = [](const Document& doc) {
                std::set<std::tuple<int, int, std::string>> s;
                for (const Annotation& a : doc.annotations)
                    s.insert({a.start, a.end, a.type});
                return s;
            };
            CHECK(gold(second.documents[d]) == gold(first.documents[d]));
        }
    }
}

TEST_CASE("entity scoring semantics") {
    SECTION("a boundary mismatch is one FP and one FN") {
        const std::vector<Entity> system = {{"d", 2, 5, "ORG"}};
        const std::vector<Entity> gold = {{"d", 2, 4, "ORG"}};
        const EvalReport report = evaluate(system, gold);
        const PRF& m = report.labels.at("ORG").entity;
        CHECK(m.tp == 0);
        CHECK(m.fp == 1);
        CHECK(m.fn == 1);
        // Token level still sees the 2-token overlap.
        const PRF& t = report.labels.at("ORG").token;
        CHECK(t.tp == 2);
        CHECK(t.fp == 1);
        CHECK(t.fn == 0);
    }
    SECTION("identical sets score perfectly") {
        const std::vector<Entity> entities = {{"d", 0, 2, "PER"}, {"d", 4, 5, "LOC"}};
        const EvalReport report = evaluate(entities, entities);
        for (const auto& [label, lr] : report.labels) {
            CHECK(lr.entity.precision() == 1.0);
            CHECK(lr.entity.recall() == 1.0);
            CHECK(lr.entity.f1() == 1.0);
        }
        CHECK(report.micro.entity.tp == 2);
    }
    SECTION("F1 is zero when nothing matches") {
        const EvalReport report = evaluate({{"d", 0, 1, "PER"}}, {{"d", 5, 6, "PER"}});
        CHECK(report.labels.at("PER").entity.f1() == 0.0);
    }
}

TEST_CASE("entity scoring agrees with a brute-force classifier") {
    // Independent oracle: enumerate exact matches with nested loops, consume
    // them, classify every residue.
    auto oracle = [](std::vector<Entity> system, std::vector<Entity> gold) {
        std::map<std::string, PRF> out;
        std::vector<bool> sys_used(system.size(), false), gold_used(gold.size(), false);
        for (size_t s = 0; s < system.size(); ++s)
            for (size_t g = 0; g < gold.size(); ++g)
                if (!sys_used[s] && !gold_used[g] && system[s] == gold[g]) {
                    sys_used[s] = gold_used[g] = true;
                    ++out[system[s].label].tp;
                }
        for (size_t s = 0; s < system.size(); ++s)
            if (!sys_used[s])
                ++out[system[s].label].fp;
        for (size_t g = 0; g < gold.size(); ++g)
            if (!gold_used[g])
                ++out[gold[g].label].fn;
        return out;
    };

    std::mt19937 rng(31337);
    std::uniform_int_distribution<int> count(0, 50);
    std::uniform_int_distribution<int> pos(0, 20);
    std::uniform_int_distribution<int> len(1, 4);
    std::uniform_int_distribution<int> label(0, 2);
    std::uniform_int_distribution<int> docs(0, 2);
    const char* labels[] = {"PER", "ORG", "LOC"};

    for (int round = 0; round < 50; ++round) {
        auto random_entities = [&] {
            std::vector<Entity> out;
            const int n = count(rng);
            for (int i = 0; i < n; ++i) {
                const int s = pos(rng);
                out.push_back({"d" + std::to_string(docs(rng)), s, s + len(rng),
                               labels[label(rng)]});
            }
            return out;
        };
        const std::vector<Entity> system = random_entities();
        const std::vector<Entity> gold = random_entities();
        const EvalReport report = evaluate(system, gold);
        const auto expected = oracle(system, gold);
        for (const auto& [name, prf] : expected) {
            INFO("round " << round << " label " << name);
            CHECK(report.labels.at(name).entity.tp == prf.tp);
            CHECK(report.labels.at(name).entity.fp == prf.fp);
            CHECK(report.labels.at(name).entity.fn == prf.fn);
        }
    }
}

TEST_CASE("config parsing") {
    SECTION("defaults match the documented pipeline") {
        const PipelineConfig cfg;
        CHECK(cfg.scoring.default_match == 1.0);
        CHECK(cfg.scoring.target_match == 100.0);
        CHECK(cfg.scoring.mismatch == -1.0);
        CHECK(cfg.scoring.gap_penalty == 2.0);
        CHECK(cfg.precision_threshold == 0.95);
        CHECK(cfg.min_support == 3);
        CHECK(cfg.prior_hi == 0.9);
        CHECK(cfg.prior_lo == 0.1);
        CHECK(cfg.max_iterations == 10);
        CHECK(cfg.targets == std::vector<std::string>{"PER", "ORG", "LOC"});
        CHECK(cfg.emitted_type("PER") == "i-per");
        CHECK(cfg.label_of_emitted("i-loc") == "LOC");
        CHECK(cfg.label_of_emitted("Token").empty());
    }
    SECTION("overrides and comments") {
        std::istringstream in(
            "# pipeline\n"
            "scoring.gap = 0.5\n"
            "scoring.combine = max\n"
            "scoring.type_match.Lookup = 2.5\n"
            "patterns.threshold = 0.8  # inline comment\n"
            "targets = PER, MISC\n"
            "keys.Token = string,category\n"
            "keys.Number.bare = true\n"
            "context.window = 4\n"
            "threads = 2\n");
        const PipelineConfig cfg = parse_config(in);
        CHECK(cfg.scoring.gap_penalty == 0.5);
        CHECK(cfg.scoring.combine == ScoringConfig::Combine::Max);
        CHECK(cfg.scoring.type_match.at("lookup") == 2.5);
        CHECK(cfg.precision_threshold == 0.8);
        CHECK(cfg.targets == std::vector<std::string>{"PER", "MISC"});
        REQUIRE(cfg.key_policy.find("Token"));
        CHECK(cfg.key_policy.find("Token")->features ==
              std::vector<std::string>{"string", "category"});
        CHECK(cfg.key_policy.find("Number")->bare);
        CHECK(cfg.token_window == 4);
        CHECK(cfg.threads == 2);
    }
    SECTION("unknown keys and invalid values are errors") {
        std::istringstream unknown("no.such.key = 1\n");
        CHECK_THROWS_WITH(parse_config(unknown),
                          Catch::Matchers::ContainsSubstring("unknown key"));
        std::istringstream bad("scoring.gap = fast\n");
        CHECK_THROWS(parse_config(bad));
        std::istringstream crossed("priors.hi = 0.1\npriors.lo = 0.5\n");
        CHECK_THROWS_WITH(parse_config(crossed), Catch::Matchers::ContainsSubstring("priors"));
        std::istringstream negative_gap("scoring.gap = -1\n");
        CHECK_THROWS(parse_config(negative_gap));
    }
}
