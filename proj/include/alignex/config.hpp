#pragma once

// Pipeline configuration: a simple "key = value" text file, '#' comments.
// Every default is overridable. Unknown keys are an error so typos do not
// silently fall back to defaults.

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignex/align.hpp"
#include "alignex/annotation.hpp"

namespace alignex {

struct PipelineConfig {
    ScoringConfig scoring;

    double precision_threshold = 0.95;
    long min_support = 3;
    size_t max_pairs = 1'000'000;
    unsigned seed = 1;

    double prior_hi = 0.9;
    double prior_lo = 0.1;

    int max_iterations = 10;
    int token_window = -1;  // < 0: whole-sentence general contexts

    std::vector<std::string> targets = {"PER", "ORG", "LOC"};
    std::string person_label = "PER";  // same-noun propagation; empty disables
    std::string atomic_type = "Token";
    std::string sentence_type = "Sentence";
    std::string emitted_prefix = "i-";
    unsigned threads = 0;  // 0 = hardware concurrency

    KeyDerivationPolicy key_policy = KeyDerivationPolicy::standard();

    std::string emitted_type(const std::string& label) const {
        return emitted_prefix + to_lower(label);
    }

    std::map<std::string, std::string> emitted_types() const {
        std::map<std::string, std::string> out;
        for (const std::string& label : targets)
            out[label] = emitted_type(label);
        return out;
    }

    /// Label for a system annotation type, if it is one of ours.
    std::string label_of_emitted(const std::string& type) const {
        for (const std::string& label : targets)
            if (emitted_type(label) == type)
                return label;
        return "";
    }

    /// Annotations that participate in grids: everything except gold target
    /// labels and sentence structure.
    AnnotationFilter grid_filter() const {
        std::vector<std::string> excluded = targets;
        excluded.push_back(sentence_type);
        return [excluded](const Annotation& a) {
            for (const std::string& t : excluded)
                if (a.type == t)
                    return false;
            return true;
        };
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ','))
        if (!trim(cur).empty())
            out.push_back(trim(cur));
    return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw std::runtime_error("config: bad boolean for '" + key + "': " + v);
}

}  // namespace detail

inline PipelineConfig parse_config(std::istream& in) {
    PipelineConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t comment = line.find('#');
        if (comment != std::string::npos)
            line = line.substr(0, comment);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "scoring.match")
                cfg.scoring.default_match = std::stod(value);
            else if (key == "scoring.target_match")
                cfg.scoring.target_match = std::stod(value);
            else if (key == "scoring.mismatch")
                cfg.scoring.mismatch = std::stod(value);
            else if (key == "scoring.gap")
                cfg.scoring.gap_penalty = std::stod(value);
            else if (key == "scoring.combine") {
                if (value == "sum")
                    cfg.scoring.combine = ScoringConfig::Combine::Sum;
                else if (value == "max")
                    cfg.scoring.combine = ScoringConfig::Combine::Max;
                else
                    throw std::runtime_error("expected sum or max");
            } else if (key.rfind("scoring.type_match.", 0) == 0) {
                cfg.scoring.type_match[to_lower(key.substr(19))] = std::stod(value);
            } else if (key == "patterns.threshold")
                cfg.precision_threshold = std::stod(value);
            else if (key == "patterns.min_support")
                cfg.min_support = std::stol(value);
            else if (key == "patterns.max_pairs")
                cfg.max_pairs = static_cast<size_t>(std::stoull(value));
            else if (key == "patterns.seed")
                cfg.seed = static_cast<unsigned>(std::stoul(value));
            else if (key == "priors.hi")
                cfg.prior_hi = std::stod(value);
            else if (key == "priors.lo")
                cfg.prior_lo = std::stod(value);
            else if (key == "engine.max_iterations")
                cfg.max_iterations = std::stoi(value);
            else if (key == "context.window")
                cfg.token_window = value == "sentence" ? -1 : std::stoi(value);
            else if (key == "targets")
                cfg.targets = detail::split_list(value);
            else if (key == "person_label")
                cfg.person_label = value;
            else if (key == "atomic_type")
                cfg.atomic_type = value;
            else if (key == "sentence_type")
                cfg.sentence_type = value;
            else if (key == "emitted_prefix")
                cfg.emitted_prefix = value;
            else if (key == "threads")
                cfg.threads = static_cast<unsigned>(std::stoul(value));
            else if (key.rfind("keys.", 0) == 0) {
                std::string rest = key.substr(5);
                const size_t dot = rest.find('.');
                if (dot != std::string::npos && rest.substr(dot + 1) == "bare") {
                    const std::string type = rest.substr(0, dot);
                    auto& rule = cfg.key_policy.rules[to_lower(type)];
                    rule.bare = detail::parse_bool(value, key);
                } else {
                    cfg.key_policy.rules[to_lower(rest)].features = detail::split_list(value);
                }
            } else {
                throw std::runtime_error("unknown key");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + " ('" + key +
                                     "'): " + e.what());
        }
    }
    if (cfg.prior_hi <= cfg.prior_lo)
        throw std::runtime_error("config: priors.hi must be greater than priors.lo");
    cfg.scoring.validate();
    return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

}  // namespace alignex
