#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "alignex/align.hpp"
#include "support/oracles.hpp"

using namespace alignex;
using testsupport::chain_oracle;
using testsupport::classic_smith_waterman;
using testsupport::random_grid;
using testsupport::sequence_grid;

namespace {

ScoringConfig simple_scoring(double match, double mismatch, double gap) {
    ScoringConfig cfg;
    cfg.default_match = match;
    cfg.target_match = std::max(match, 100.0);
    cfg.mismatch = mismatch;
    cfg.gap_penalty = gap;
    return cfg;
}

}  // namespace

TEST_CASE("ABCDE vs HABGCD: matrix, maximum and backtrace") {
    const AnnotationGrid X = sequence_grid("ABCDE");
    const AnnotationGrid Y = sequence_grid("HABGCD");
    const AlignmentResult result = align_full(X, Y, simple_scoring(1, -1, 0));

    // Recurrence-derived values; rows run down Y (H..D), columns across X (A..E).
    const double expected[6][5] = {
        {0, 0, 0, 0, 0},  // H
        {1, 1, 1, 1, 1},  // A
        {1, 2, 2, 2, 2},  // B
        {1, 2, 2, 2, 2},  // G
        {1, 2, 3, 3, 3},  // C
        {1, 2, 3, 4, 4},  // D
    };
    for (int j = 1; j <= 6; ++j)
        for (int i = 1; i <= 5; ++i)
            CHECK(result.matrix.score(i, j) == expected[j - 1][i - 1]);
    for (int i = 0; i <= 5; ++i)
        CHECK(result.matrix.score(i, 0) == 0);
    for (int j = 0; j <= 6; ++j)
        CHECK(result.matrix.score(0, j) == 0);

    const auto max_cell = global_max(result.matrix);
    REQUIRE(max_cell.has_value());
    CHECK(*max_cell == std::pair<int, int>{4, 6});  // origin of the D-D match
    CHECK(result.alignment.score == 4);

    // A B [gap over G] C D
    const Alignment& a = result.alignment;
    REQUIRE(a.elements.size() == 4);
    const char expected_chars[] = {'A', 'B', 'C', 'D'};
    const int expected_x[] = {0, 1, 2, 3};
    const int expected_y[] = {1, 2, 4, 5};
    for (size_t k = 0; k < 4; ++k) {
        CHECK(a.elements[k].x_start == expected_x[k]);
        CHECK(a.elements[k].y_start == expected_y[k]);
        CHECK(a.elements[k].x_len == 1);
        CHECK(a.elements[k].y_len == 1);
        REQUIRE(a.elements[k].keys.size() == 1);
        CHECK(a.elements[k].keys[0].value == std::string(1, expected_chars[k]));
    }
    CHECK(a.gap_before(1) == std::pair<int, int>{0, 0});
    CHECK(a.gap_before(2) == std::pair<int, int>{0, 1});
    CHECK(a.gap_before(3) == std::pair<int, int>{0, 0});
}

TEST_CASE("agrees with the textbook recurrence on flat sequences") {
    std::mt19937 rng(7001);
    std::uniform_int_distribution<int> len_dist(0, 12);
    std::uniform_int_distribution<int> letter(0, 3);
    std::uniform_real_distribution<double> match_dist(0.5, 3.0);
    std::uniform_real_distribution<double> mismatch_dist(-3.0, 0.0);
    std::uniform_real_distribution<double> gap_dist(0.0, 3.0);

    for (int round = 0; round < 250; ++round) {
        std::string a, b;
        const int la = len_dist(rng), lb = len_dist(rng);
        for (int i = 0; i < la; ++i)
            a.push_back(static_cast<char>('a' + letter(rng)));
        for (int i = 0; i < lb; ++i)
            b.push_back(static_cast<char>('a' + letter(rng)));
        const double match = match_dist(rng);
        const double mismatch = mismatch_dist(rng);
        const double gap = gap_dist(rng);

        const double expected = classic_smith_waterman(a, b, match, mismatch, gap);
        const Alignment got =
            align(sequence_grid(a), sequence_grid(b), simple_scoring(match, mismatch, gap));
        INFO("a=" << a << " b=" << b << " match=" << match << " mismatch=" << mismatch
                  << " gap=" << gap);
        REQUIRE_THAT(got.score, Catch::Matchers::WithinAbs(expected, 1e-9));
    }
}

TEST_CASE("agrees with the exhaustive chain oracle on small grids") {
    std::mt19937 rng(7002);
    std::uniform_int_distribution<int> gap_dist(0, 2);
    for (int round = 0; round < 120; ++round) {
        const AnnotationGrid X = random_grid(rng, 6, 3, 3);
        const AnnotationGrid Y = random_grid(rng, 6, 3, 3);
        ScoringConfig cfg = simple_scoring(1, -1, gap_dist(rng));
        if (round % 2)
            cfg.combine = ScoringConfig::Combine::Max;

        const double expected = chain_oracle(X, Y, cfg);
        const double got = align(X, Y, cfg).score;
        INFO("round " << round);
        REQUIRE_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-9));
    }
}

TEST_CASE("co-occurring keys combine per configuration") {
    AnnotationGrid g;
    g.length = 1;
    g.starts.resize(1);
    g.add(0, {{"t", "string", "x"}, 1, ElementSource::Atom, 0});
    g.add(0, {{"pos", "", ""}, 1, ElementSource::Annotation, -1});

    ScoringConfig cfg = simple_scoring(1, -1, 2);
    const Alignment sum = align(g, g, cfg);
    REQUIRE(sum.elements.size() == 1);
    CHECK(sum.elements[0].keys.size() == 2);
    CHECK(sum.score == 2);

    cfg.combine = ScoringConfig::Combine::Max;
    const Alignment mx = align(g, g, cfg);
    REQUIRE(mx.elements.size() == 1);
    CHECK(mx.elements[0].keys.size() == 2);
    CHECK(mx.score == 1);
}

TEST_CASE("global_max tie-breaking and the all-zero sentinel") {
    AlignmentMatrix m;
    m.x_size = 3;
    m.y_size = 3;
    m.cells.assign(9, {});

    SECTION("all-zero matrix has no alignment") {
        CHECK_FALSE(global_max(m).has_value());
    }
    SECTION("ties go to the lexicographically smaller cell") {
        m.at(1, 2).score = 5;
        m.at(2, 1).score = 5;
        REQUIRE(global_max(m) == std::pair<int, int>{1, 2});
        m.at(1, 1).score = 5;
        REQUIRE(global_max(m) == std::pair<int, int>{1, 1});
    }
}

TEST_CASE("self-alignment covers every atom position") {
    std::mt19937 rng(7003);
    std::uniform_int_distribution<int> atoms_dist(1, 8);
    std::uniform_int_distribution<int> letter(0, 3);
    std::uniform_int_distribution<int> short_extras(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    const char* short_types[] = {"pos", "shape"};

    for (int round = 0; round < 60; ++round) {
        AnnotationGrid g;
        g.length = atoms_dist(rng);
        g.starts.resize(static_cast<size_t>(g.length));
        std::vector<double> per_position(static_cast<size_t>(g.length), 0.0);
        for (int i = 0; i < g.length; ++i) {
            g.add(i, {{"t", "string", std::string(1, static_cast<char>('a' + letter(rng)))},
                      1, ElementSource::Atom, i});
            per_position[static_cast<size_t>(i)] += 1;
            const int extras = short_extras(rng);
            for (int k = 0; k < extras; ++k) {
                g.add(i, {{short_types[k % 2], "", std::to_string(k)},
                          1, ElementSource::Annotation, -1});
                per_position[static_cast<size_t>(i)] += 1;
            }
            if (coin(rng) && g.length - i >= 2) {
                std::uniform_int_distribution<int> len_dist(2, std::min(3, g.length - i));
                g.add(i, {{"phrase", "", ""}, len_dist(rng), ElementSource::Annotation, -1});
            }
        }

        const Alignment a = align(g, g, simple_scoring(1, -1, 2));
        double expected = 0;
        for (double v : per_position)
            expected += v;
        INFO("round " << round);
        REQUIRE_THAT(a.score, Catch::Matchers::WithinAbs(expected, 1e-9));

        std::set<int> covered;
        for (const AlignedElement& e : a.elements) {
            CHECK(e.x_start == e.y_start);
            for (int p = e.x_start; p < e.x_start + e.x_len; ++p)
                covered.insert(p);
        }
        REQUIRE(static_cast<int>(covered.size()) == g.length);
    }
}

TEST_CASE("score symmetry and monotone output on random grids") {
    std::mt19937 rng(7004);
    for (int round = 0; round < 60; ++round) {
        const AnnotationGrid X = random_grid(rng, 6, 2, 3);
        const AnnotationGrid Y = random_grid(rng, 6, 2, 3);
        const ScoringConfig cfg = simple_scoring(1, -1, 1);
        const Alignment xy = align(X, Y, cfg);
        const Alignment yx = align(Y, X, cfg);
        REQUIRE_THAT(xy.score, Catch::Matchers::WithinAbs(yx.score, 1e-9));
        CHECK(xy.score >= 0);

        for (size_t k = 1; k < xy.elements.size(); ++k) {
            const AlignedElement& prev = xy.elements[k - 1];
            const AlignedElement& cur = xy.elements[k];
            CHECK(cur.x_start >= prev.x_start + prev.x_len);
            CHECK(cur.y_start >= prev.y_start + prev.y_len);
        }
    }
}

TEST_CASE("disjoint key sets yield the empty alignment") {
    const Alignment a =
        align(sequence_grid("abc"), sequence_grid("xyz"), simple_scoring(1, -1, 1));
    CHECK(a.score == 0);
    CHECK(a.empty());
}

TEST_CASE("empty grids are not an error") {
    const AnnotationGrid empty = sequence_grid("");
    const Alignment a = align(empty, sequence_grid("ab"), simple_scoring(1, -1, 1));
    CHECK(a.score == 0);
    CHECK(a.empty());
}

TEST_CASE("mismatch steps can bridge where gaps are too expensive") {
    // Middle atoms differ; with a high gap penalty the diagonal mismatch is
    // the only affordable bridge and shows up as a (1,1) discontinuity.
    const Alignment a =
        align(sequence_grid("axb"), sequence_grid("ayb"), simple_scoring(2, -1, 5));
    REQUIRE(a.elements.size() == 2);
    CHECK(a.score == 3);  // 2 - 1 + 2
    CHECK(a.gap_before(1) == std::pair<int, int>{1, 1});
}

TEST_CASE("rectangular spans align elements of different atom lengths") {
    // Same bare key over 2 atoms in X and 3 atoms in Y.
    AnnotationGrid X = sequence_grid("ab");
    X.add(0, {{"org", "", ""}, 2, ElementSource::Annotation, -1});
    AnnotationGrid Y = sequence_grid("xyz");
    Y.add(0, {{"org", "", ""}, 3, ElementSource::Annotation, -1});

    const Alignment a = align(X, Y, simple_scoring(1, -1, 2));
    REQUIRE(a.elements.size() == 1);
    CHECK(a.elements[0].x_len == 2);
    CHECK(a.elements[0].y_len == 3);
    CHECK(a.elements[0].keys == std::vector<ElementKey>{{"org", "", ""}});
    CHECK(a.score == 1);
}

TEST_CASE("matrix dump lists scores and spans") {
    const AlignmentResult result =
        align_full(sequence_grid("ab"), sequence_grid("ab"), simple_scoring(1, -1, 0));
    const std::string dump = dump_matrix(result.matrix);
    CHECK(dump.find("spans:") != std::string::npos);
    CHECK(dump.find('2') != std::string::npos);  // the a-b diagonal reaches 2
}
