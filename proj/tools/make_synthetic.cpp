// Generates the bundled synthetic corpus: short sports-results documents with
// Token/Lookup/Number annotations and gold PER/ORG/LOC targets, written as
// annotation-record files. Deterministic for a given seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"
#include "alignex/records.hpp"

using namespace alignex;

namespace {

const std::vector<std::string> kFirsts = {"Mark",   "Boris", "Steffi", "Michael",
                                          "Anna",   "Petr",  "Monica", "Ivan",
                                          "Serena", "Andre", "Martina", "Goran"};
const std::vector<std::string> kLasts = {"Smith",  "Becker", "Graf",    "Chang",
                                         "Novotna", "Korda",  "Seles",   "Lendl",
                                         "Agassi", "Sanchez", "Stich",   "Keller"};
const std::vector<std::string> kCountries = {"Germany", "Austria", "France",  "Spain",
                                             "Sweden",  "Italy",   "Russia", "Croatia",
                                             "Norway",  "Brazil"};
const std::vector<std::string> kCities = {"Vienna", "Paris",  "Hamburg", "Madrid",
                                          "Moscow", "Oslo",   "Rome",    "London",
                                          "Berlin", "Geneva"};
const std::vector<std::string> kOrgs = {"Lakers", "Bulls",   "Rockets", "Spurs",
                                        "Hawks",  "Celtics", "Knicks",  "Jazz"};
const std::vector<std::vector<std::string>> kOrgPairs = {
    {"Red", "Star"}, {"Blue", "Sox"}, {"Golden", "Bears"}, {"Silver", "Arrows"}};
const std::vector<std::string> kJobtitles = {"champion", "goalkeeper", "coach", "captain",
                                             "striker"};
const std::vector<std::vector<std::string>> kNoise = {
    {"the", "match", "was", "long"},
    {"rain", "delayed", "play", "briefly"},
    {"officials", "said", "nothing", "afterwards"},
    {"the", "crowd", "cheered", "loudly"},
    {"tickets", "sold", "out", "quickly"},
    {"fans", "waited", "outside", "patiently"},
};

struct Builder {
    Document doc;
    std::mt19937& rng;

    explicit Builder(std::string id, std::mt19937& r) : rng(r) { doc.id = std::move(id); }

    template <typename T>
    const T& pick(const std::vector<T>& pool) {
        std::uniform_int_distribution<size_t> dist(0, pool.size() - 1);
        return pool[dist(rng)];
    }

    int add_token(const std::string& word, const std::string& pos) {
        const int i = doc.atom_count();
        Annotation atom{doc.id, i, i + 1, "Token", {}};
        atom.features["string"] = word;
        atom.features["root"] = to_lower(word);
        atom.features["category"] = pos;
        doc.atoms.push_back(std::move(atom));
        return i;
    }

    void add_lookup(int start, int end, const std::string& major) {
        doc.annotations.push_back({doc.id, start, end, "Lookup", {{"majorType", major}}});
    }

    void add_gold(int start, int end, const std::string& label) {
        doc.annotations.push_back({doc.id, start, end, label, {}});
    }

    int add_number() {
        std::uniform_int_distribution<int> whole(1, 120);
        std::uniform_int_distribution<int> frac(0, 99);
        std::uniform_int_distribution<int> style(0, 2);
        std::string text = std::to_string(whole(rng));
        if (style(rng) == 0)
            text += "." + std::to_string(frac(rng));
        const int i = add_token(text, "CD");
        doc.annotations.push_back({doc.id, i, i + 1, "Number", {{"value", text}}});
        return i;
    }

    void close_sentence(int start) { doc.sentences.push_back({start, doc.atom_count()}); }

    // "<First> <Last> ( <Country> ) <num>"
    void athlete_result() {
        const int s = doc.atom_count();
        const std::string& first = pick(kFirsts);
        const std::string& last = pick(kLasts);
        const std::string& country = pick(kCountries);
        const int f = add_token(first, "NNP");
        add_lookup(f, f + 1, "person_first");
        add_token(last, "NNP");
        add_token("(", "(");
        const int c = add_token(country, "NNP");
        add_lookup(c, c + 1, "location");
        add_token(")", ")");
        add_number();
        add_gold(f, f + 2, "PER");
        add_gold(c, c + 1, "LOC");
        close_sentence(s);
    }

    // "<jobtitle> <First> <Last> won in <City>"
    void jobtitle_person() {
        const int s = doc.atom_count();
        const int j = add_token(pick(kJobtitles), "NN");
        add_lookup(j, j + 1, "jobtitle");
        const int f = add_token(pick(kFirsts), "NNP");
        add_lookup(f, f + 1, "person_first");
        add_token(pick(kLasts), "NNP");
        add_token("won", "VBD");
        add_token("in", "IN");
        const int c = add_token(pick(kCities), "NNP");
        add_lookup(c, c + 1, "location");
        add_gold(f, f + 2, "PER");
        add_gold(c, c + 1, "LOC");
        close_sentence(s);
    }

    // "<Org> <num> <num> <num>"
    void standings_line() {
        const int s = doc.atom_count();
        std::uniform_int_distribution<int> two(0, 2);
        int org_start, org_end;
        if (two(rng) == 0) {
            const auto& words = pick(kOrgPairs);
            org_start = add_token(words[0], "NNP");
            add_token(words[1], "NNP");
            org_end = org_start + 2;
        } else {
            org_start = add_token(pick(kOrgs), "NNP");
            org_end = org_start + 1;
        }
        add_lookup(org_start, org_end, "organization");
        add_number();
        add_number();
        add_number();
        add_gold(org_start, org_end, "ORG");
        close_sentence(s);
    }

    // "<City> <num> - <num>"
    void city_score() {
        const int s = doc.atom_count();
        const int c = add_token(pick(kCities), "NNP");
        add_lookup(c, c + 1, "location");
        add_number();
        add_token("-", ":");
        add_number();
        add_gold(c, c + 1, "LOC");
        close_sentence(s);
    }

    // "teams met at <City>"
    void venue_line() {
        const int s = doc.atom_count();
        add_token("teams", "NNS");
        add_token("met", "VBD");
        add_token("at", "IN");
        const int c = add_token(pick(kCities), "NNP");
        add_lookup(c, c + 1, "location");
        add_gold(c, c + 1, "LOC");
        close_sentence(s);
    }

    void noise_line() {
        const int s = doc.atom_count();
        for (const std::string& w : pick(kNoise))
            add_token(w, w == "the" ? "DT" : "NN");
        close_sentence(s);
    }

    // "<Last> scored again" - only priors can catch this one.
    void prior_only_line() {
        const int s = doc.atom_count();
        const int l = add_token(pick(kLasts), "NNP");
        add_token("scored", "VBD");
        add_token("again", "RB");
        add_gold(l, l + 1, "PER");
        close_sentence(s);
    }

    // "<Last> was tired" with the same noun elsewhere labeled person.
    void same_noun_line(const std::string& last) {
        const int s = doc.atom_count();
        const int l = add_token(last, "NNP");
        add_token("was", "VBD");
        add_token("tired", "JJ");
        add_gold(l, l + 1, "PER");
        close_sentence(s);
    }
};

std::vector<Document> make_split(const std::string& prefix, int doc_count, unsigned seed,
                                 bool held_out) {
    std::mt19937 rng(seed);
    std::vector<Document> docs;
    std::uniform_int_distribution<int> template_dist(0, 5);
    for (int d = 0; d < doc_count; ++d) {
        Builder b(prefix + "-" + std::to_string(d + 1), rng);
        std::uniform_int_distribution<int> sentence_count(3, 5);
        const int sentences = sentence_count(rng);
        for (int s = 0; s < sentences; ++s) {
            switch (template_dist(rng)) {
                case 0: b.athlete_result(); break;
                case 1: b.jobtitle_person(); break;
                case 2: b.standings_line(); break;
                case 3: b.city_score(); break;
                case 4: b.venue_line(); break;
                default: b.noise_line(); break;
            }
        }
        if (held_out) {
            // Exercise the prior and propagation paths on the held-out split.
            if (d % 3 == 0)
                b.prior_only_line();
            if (d % 4 == 0) {
                const std::string& last = kLasts[static_cast<size_t>(d) % kLasts.size()];
                const int s0 = b.doc.atom_count();
                const int f = b.add_token(kFirsts[static_cast<size_t>(d) % kFirsts.size()], "NNP");
                b.add_lookup(f, f + 1, "person_first");
                b.add_token(last, "NNP");
                b.add_token("(", "(");
                const int c = b.add_token(kCountries[static_cast<size_t>(d) % kCountries.size()],
                                          "NNP");
                b.add_lookup(c, c + 1, "location");
                b.add_token(")", ")");
                b.add_number();
                b.add_gold(f, f + 2, "PER");
                b.add_gold(c, c + 1, "LOC");
                b.close_sentence(s0);
                b.same_noun_line(last);
            }
        }
        b.doc.validate();
        docs.push_back(std::move(b.doc));
    }
    return docs;
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path out_dir = "data/synthetic";
    if (argc > 1)
        out_dir = argv[1];
    std::filesystem::create_directories(out_dir);

    const std::vector<Document> train = make_split("synth-train", 24, 41, false);
    const std::vector<Document> test = make_split("synth-test", 12, 42, true);

    {
        std::ofstream out(out_dir / "train.ann");
        write_annotation_records(out, train);
    }
    {
        std::ofstream out(out_dir / "test.ann");
        write_annotation_records(out, test);
    }
    long train_sentences = 0, test_sentences = 0;
    for (const Document& d : train)
        train_sentences += static_cast<long>(d.sentences.size());
    for (const Document& d : test)
        test_sentences += static_cast<long>(d.sentences.size());
    std::cout << "wrote " << train.size() << " training documents (" << train_sentences
              << " sentences) and " << test.size() << " held-out documents (" << test_sentences
              << " sentences) to " << out_dir << "\n";
    return 0;
}
