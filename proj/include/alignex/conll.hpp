#pragma once

// CoNLL-2003 column format: one token per line (word POS [chunk...] NER),
// blank lines between sentences, -DOCSTART- lines between documents. The NER
// column is BIO; a bare I- tag with no matching run in progress is treated
// leniently as B- and counted.

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"

namespace alignex {

struct ConllResult {
    std::vector<Document> documents;
    long lenient_i_tags = 0;  // I- tags that had to open an entity
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok)
        out.push_back(tok);
    return out;
}

}  // namespace detail

/// `stem` seeds document ids: <stem>-0001, <stem>-0002, ...
inline ConllResult read_conll(std::istream& in, const std::string& stem = "doc") {
    ConllResult result;
    Document doc;
    int doc_number = 0;

    std::string open_label;  // currently open BIO run
    int open_start = -1;
    int sentence_start = 0;

    auto close_entity = [&](int end) {
        if (!open_label.empty()) {
            doc.annotations.push_back({doc.id, open_start, end, open_label, {}});
            open_label.clear();
        }
    };
    auto close_sentence = [&] {
        close_entity(doc.atom_count());
        if (doc.atom_count() > sentence_start) {
            doc.sentences.push_back({sentence_start, doc.atom_count()});
            sentence_start = doc.atom_count();
        }
    };
    auto flush_document = [&] {
        close_sentence();
        if (doc.atom_count() > 0) {
            ++doc_number;
            result.documents.push_back(std::move(doc));
        }
        doc = Document{};
        doc.id = stem + "-" + std::to_string(doc_number + 1);
        sentence_start = 0;
    };

    doc.id = stem + "-" + std::to_string(doc_number + 1);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty()) {
            close_sentence();
            continue;
        }
        const std::vector<std::string> cols = detail::split_ws(line);
        if (cols[0] == "-DOCSTART-") {
            flush_document();
            continue;
        }
        if (cols.size() < 2)
            throw std::runtime_error("conll line " + std::to_string(line_no) +
                                     ": expected word, POS and NER columns");

        const int i = doc.atom_count();
        Annotation atom;
        atom.document_id = doc.id;
        atom.start = i;
        atom.end = i + 1;
        atom.type = "Token";
        atom.features["string"] = cols[0];
        atom.features["root"] = to_lower(cols[0]);
        atom.features["category"] = cols[1];
        if (cols.size() >= 4)
            atom.features["chunk"] = cols[2];
        doc.atoms.push_back(std::move(atom));

        const std::string& ner = cols.back();
        if (ner == "O") {
            close_entity(i);
        } else if (ner.size() > 2 && (ner[0] == 'B' || ner[0] == 'I') && ner[1] == '-') {
            const std::string label = ner.substr(2);
            if (ner[0] == 'B') {
                close_entity(i);
                open_label = label;
                open_start = i;
            } else if (open_label == label) {
                // continuation
            } else {
                if (open_label.empty())
                    ++result.lenient_i_tags;  // I- without a B-: open leniently
                close_entity(i);
                open_label = label;
                open_start = i;
            }
        } else {
            throw std::runtime_error("conll line " + std::to_string(line_no) +
                                     ": malformed NER tag '" + ner + "'");
        }
    }
    flush_document();
    return result;
}

/// Re-emission in the same column layout with IOB2 tags. Annotation types in
/// `labels` are rendered as entities; everything else is dropped (the format
/// cannot carry overlapping or featureful annotations).
inline void write_conll(std::ostream& out, const std::vector<Document>& docs,
                        const std::vector<std::string>& labels) {
    for (const Document& doc : docs) {
        out << "-DOCSTART- -X- -X- O\n\n";
        std::vector<std::string> tags(static_cast<size_t>(doc.atom_count()), "O");
        std::vector<const Annotation*> entities;
        for (const Annotation& a : doc.annotations)
            for (const std::string& label : labels)
                if (a.type == label)
                    entities.push_back(&a);
        std::sort(entities.begin(), entities.end(), [](const Annotation* a, const Annotation* b) {
            return std::tie(a->start, a->end) < std::tie(b->start, b->end);
        });
        for (const Annotation* a : entities) {
            for (int i = a->start; i < a->end; ++i)
                tags[static_cast<size_t>(i)] = (i == a->start ? "B-" : "I-") + a->type;
        }
        for (auto [s, e] : doc.sentence_ranges()) {
            for (int i = s; i < e; ++i) {
                const Annotation& atom = doc.atoms[static_cast<size_t>(i)];
                const std::string* word = atom.feature("string");
                const std::string* pos = atom.feature("category");
                const std::string* chunk = atom.feature("chunk");
                out << (word ? *word : "?") << ' ' << (pos ? *pos : "-X-") << ' '
                    << (chunk ? *chunk : "-X-") << ' ' << tags[static_cast<size_t>(i)] << '\n';
            }
            out << '\n';
        }
    }
}

}  // namespace alignex
