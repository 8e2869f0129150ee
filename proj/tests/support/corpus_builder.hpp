#pragma once

// Compact document construction for tests: space-separated "word/POS" tokens
// per sentence, with annotations layered on by atom range.

#include <sstream>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"

namespace testsupport {

class DocBuilder {
  public:
    explicit DocBuilder(std::string id) { doc_.id = std::move(id); }

    /// Adds one sentence: tokens like "Mark/NNP smith/NN (/( 9.8/CD".
    DocBuilder& sentence(const std::string& spec) {
        const int start = doc_.atom_count();
        std::istringstream is(spec);
        std::string item;
        while (is >> item) {
            const size_t slash = item.rfind('/');
            const std::string word = slash == std::string::npos ? item : item.substr(0, slash);
            const std::string pos = slash == std::string::npos ? "NN" : item.substr(slash + 1);
            const int i = doc_.atom_count();
            alignex::Annotation atom{doc_.id, i, i + 1, "Token", {}};
            atom.features["string"] = word;
            atom.features["root"] = alignex::to_lower(word);
            atom.features["category"] = pos;
            doc_.atoms.push_back(std::move(atom));
        }
        doc_.sentences.push_back({start, doc_.atom_count()});
        return *this;
    }

    DocBuilder& annotate(int start, int end, const std::string& type,
                         std::map<std::string, std::string> features = {}) {
        doc_.annotations.push_back({doc_.id, start, end, type, std::move(features)});
        return *this;
    }

    DocBuilder& lookup(int start, int end, const std::string& major) {
        return annotate(start, end, "Lookup", {{"majorType", major}});
    }

    DocBuilder& number(int index) {
        const std::string* v = doc_.atoms[static_cast<size_t>(index)].feature("string");
        return annotate(index, index + 1, "Number", {{"value", v ? *v : "0"}});
    }

    alignex::Document build() {
        doc_.validate();
        return doc_;
    }

  private:
    alignex::Document doc_;
};

}  // namespace testsupport
