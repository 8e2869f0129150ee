#pragma once

// Line-delimited annotation records, the generic ingestion/emission format:
// one annotation per line, tab-separated fields
//   doc_id <TAB> start <TAB> end <TAB> type [<TAB> feature=value]...
// Tabs, newlines and backslashes inside fields are escaped as \t, \n, \\;
// a literal '=' in a feature name is \=. Records of the atomic type become
// a document's atoms, records of the sentence type its sentence boundaries.

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"

namespace alignex {

struct RecordFormat {
    std::string atomic_type = "Token";
    std::string sentence_type = "Sentence";
};

namespace detail {

inline std::string escape_field(const std::string& s, bool escape_eq = false) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\\': out += "\\\\"; break;
            case '=':
                if (escape_eq)
                    out += "\\=";
                else
                    out.push_back(c);
                break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string unescape_field(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            char c = s[++i];
            if (c == 't')
                out.push_back('\t');
            else if (c == 'n')
                out.push_back('\n');
            else
                out.push_back(c);  // \\, \=, anything else literal
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && i + 1 < line.size()) {
            cur.push_back(line[i]);
            cur.push_back(line[++i]);
        } else if (line[i] == '\t') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(line[i]);
        }
    }
    fields.push_back(cur);
    return fields;
}

// Splits "feature=value" at the first unescaped '='.
inline std::pair<std::string, std::string> split_feature(const std::string& field, size_t line_no) {
    for (size_t i = 0; i < field.size(); ++i) {
        if (field[i] == '\\') {
            ++i;
            continue;
        }
        if (field[i] == '=')
            return {unescape_field(field.substr(0, i)), unescape_field(field.substr(i + 1))};
    }
    throw std::runtime_error("annotation records line " + std::to_string(line_no) +
                             ": feature field without '='");
}

}  // namespace detail

inline std::string serialize_record(const Annotation& a) {
    std::string out = detail::escape_field(a.document_id);
    out += '\t' + std::to_string(a.start);
    out += '\t' + std::to_string(a.end);
    out += '\t' + detail::escape_field(a.type);
    for (const auto& [name, value] : a.features)
        out += '\t' + detail::escape_field(name, /*escape_eq=*/true) + '=' +
               detail::escape_field(value);
    return out;
}

inline Annotation parse_record(const std::string& line, size_t line_no) {
    const std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() < 4)
        throw std::runtime_error("annotation records line " + std::to_string(line_no) +
                                 ": expected at least 4 tab-separated fields");
    Annotation a;
    a.document_id = detail::unescape_field(fields[0]);
    try {
        a.start = std::stoi(fields[1]);
        a.end = std::stoi(fields[2]);
    } catch (const std::exception&) {
        throw std::runtime_error("annotation records line " + std::to_string(line_no) +
                                 ": start/end are not integers");
    }
    a.type = detail::unescape_field(fields[3]);
    if (a.type.empty())
        throw std::runtime_error("annotation records line " + std::to_string(line_no) +
                                 ": empty annotation type");
    for (size_t i = 4; i < fields.size(); ++i) {
        auto [name, value] = detail::split_feature(fields[i], line_no);
        if (name.empty())
            throw std::runtime_error("annotation records line " + std::to_string(line_no) +
                                     ": empty feature name");
        a.features[name] = value;
    }
    return a;
}

/// Groups records into documents (in first-appearance order), turning atomic
/// records into atoms and sentence records into boundaries. Documents are
/// validated: atoms must tile, sentences must partition.
inline std::vector<Document> read_annotation_records(std::istream& in,
                                                     const RecordFormat& fmt = {}) {
    std::map<std::string, size_t> index;
    std::vector<Document> docs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        Annotation a = parse_record(line, line_no);
        auto [it, inserted] = index.emplace(a.document_id, docs.size());
        if (inserted) {
            docs.emplace_back();
            docs.back().id = a.document_id;
        }
        Document& doc = docs[it->second];
        if (a.type == fmt.atomic_type) {
            if (a.end != a.start + 1)
                throw std::runtime_error("annotation records line " + std::to_string(line_no) +
                                         ": atomic annotation must have length 1");
            doc.atoms.push_back(std::move(a));
        } else if (a.type == fmt.sentence_type) {
            doc.sentences.push_back({a.start, a.end});
        } else {
            doc.annotations.push_back(std::move(a));
        }
    }
    for (Document& doc : docs) {
        std::sort(doc.atoms.begin(), doc.atoms.end(),
                  [](const Annotation& a, const Annotation& b) { return a.start < b.start; });
        std::sort(doc.sentences.begin(), doc.sentences.end());
        doc.validate();
    }
    return docs;
}

/// Full corpus emission: atoms, sentence boundaries, then annotations in a
/// stable (start, end, type) order, so that re-applying a fixed pipeline
/// reproduces the file byte for byte.
inline void write_annotation_records(std::ostream& out, const std::vector<Document>& docs,
                                     const RecordFormat& fmt = {}) {
    for (const Document& doc : docs) {
        for (const Annotation& atom : doc.atoms)
            out << serialize_record(atom) << '\n';
        for (auto [s, e] : doc.sentences)
            out << serialize_record({doc.id, s, e, fmt.sentence_type, {}}) << '\n';
        std::vector<const Annotation*> sorted;
        sorted.reserve(doc.annotations.size());
        for (const Annotation& a : doc.annotations)
            sorted.push_back(&a);
        std::sort(sorted.begin(), sorted.end(), [](const Annotation* a, const Annotation* b) {
            return std::tie(a->start, a->end, a->type, a->features) <
                   std::tie(b->start, b->end, b->type, b->features);
        });
        for (const Annotation* a : sorted)
            out << serialize_record(*a) << '\n';
    }
}

}  // namespace alignex
