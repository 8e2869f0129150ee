#pragma once

// Entity- and token-level scoring. At the entity level only an exact
// range+label match is a true positive; a system entity that overlaps gold
// with any boundary difference counts as one false positive AND one false
// negative. Token level compares per-token label coverage.

#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"

namespace alignex {

struct Entity {
    std::string document_id;
    int start = 0, end = 0;
    std::string label;

    friend auto operator<=>(const Entity&, const Entity&) = default;
};

struct PRF {
    long tp = 0, fp = 0, fn = 0;

    double precision() const { return tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0; }
    double recall() const { return tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0; }
    double f1() const {
        const double p = precision(), r = recall();
        return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
};

struct LabelReport {
    PRF entity;
    PRF token;
};

struct EvalReport {
    std::map<std::string, LabelReport> labels;
    LabelReport micro;  // summed counts over all labels
};

inline EvalReport evaluate(const std::vector<Entity>& system, const std::vector<Entity>& gold) {
    EvalReport report;
    std::set<std::string> label_names;
    for (const Entity& e : system)
        label_names.insert(e.label);
    for (const Entity& e : gold)
        label_names.insert(e.label);

    for (const std::string& label : label_names) {
        LabelReport& lr = report.labels[label];

        std::multiset<std::tuple<std::string, int, int>> gold_spans;
        for (const Entity& e : gold)
            if (e.label == label)
                gold_spans.insert({e.document_id, e.start, e.end});
        for (const Entity& e : system) {
            if (e.label != label)
                continue;
            auto it = gold_spans.find({e.document_id, e.start, e.end});
            if (it != gold_spans.end()) {
                ++lr.entity.tp;
                gold_spans.erase(it);
            } else {
                ++lr.entity.fp;
            }
        }
        lr.entity.fn = static_cast<long>(gold_spans.size());

        std::set<std::pair<std::string, int>> sys_tokens, gold_tokens;
        for (const Entity& e : system)
            if (e.label == label)
                for (int i = e.start; i < e.end; ++i)
                    sys_tokens.insert({e.document_id, i});
        for (const Entity& e : gold)
            if (e.label == label)
                for (int i = e.start; i < e.end; ++i)
                    gold_tokens.insert({e.document_id, i});
        for (const auto& t : sys_tokens)
            gold_tokens.count(t) ? ++lr.token.tp : ++lr.token.fp;
        for (const auto& t : gold_tokens)
            if (!sys_tokens.count(t))
                ++lr.token.fn;

        report.micro.entity.tp += lr.entity.tp;
        report.micro.entity.fp += lr.entity.fp;
        report.micro.entity.fn += lr.entity.fn;
        report.micro.token.tp += lr.token.tp;
        report.micro.token.fp += lr.token.fp;
        report.micro.token.fn += lr.token.fn;
    }
    return report;
}

inline std::string format_report(const EvalReport& report, const std::string& title = "") {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    if (!title.empty())
        os << title << '\n';
    os << std::left << std::setw(8) << "label" << std::setw(7) << "level" << std::right
       << std::setw(7) << "P" << std::setw(7) << "R" << std::setw(7) << "F1" << std::setw(7)
       << "TP" << std::setw(7) << "FP" << std::setw(7) << "FN" << '\n';
    auto row = [&](const std::string& label, const std::string& level, const PRF& m) {
        os << std::left << std::setw(8) << label << std::setw(7) << level << std::right
           << std::setw(7) << m.precision() << std::setw(7) << m.recall() << std::setw(7)
           << m.f1() << std::setw(7) << m.tp << std::setw(7) << m.fp << std::setw(7) << m.fn
           << '\n';
    };
    for (const auto& [label, lr] : report.labels) {
        row(label, "entity", lr.entity);
        row(label, "token", lr.token);
    }
    row("ALL", "entity", report.micro.entity);
    row("ALL", "token", report.micro.token);
    return os.str();
}

/// Machine-readable line records:
///   variant <TAB> label <TAB> level <TAB> P <TAB> R <TAB> F1 <TAB> TP <TAB> FP <TAB> FN
inline void write_report_records(std::ostream& out, const EvalReport& report,
                                 const std::string& variant) {
    auto row = [&](const std::string& label, const std::string& level, const PRF& m) {
        out << variant << '\t' << label << '\t' << level << '\t' << m.precision() << '\t'
            << m.recall() << '\t' << m.f1() << '\t' << m.tp << '\t' << m.fp << '\t' << m.fn
            << '\n';
    };
    for (const auto& [label, lr] : report.labels) {
        row(label, "entity", lr.entity);
        row(label, "token", lr.token);
    }
    row("ALL", "entity", report.micro.entity);
    row("ALL", "token", report.micro.token);
}

}  // namespace alignex
