#pragma once

// Extended Smith-Waterman local alignment over two annotation grids.
//
// Unlike the textbook algorithm over flat sequences, every grid position may
// hold several overlapping, multi-atom elements. A matching element pair
// (x at i, y at j) forms a span: a rectangle whose terminal is cell (i, j)
// and whose origin is (i + len(x), j + len(y)). Scores live at span origins,
// backtracking jumps span-wise from origin to terminal, and pairs that share
// the exact same rectangle are recorded together as co-occurring keys.

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignex/annotation.hpp"

namespace alignex {

struct ScoringConfig {
    enum class Combine { Sum, Max };

    double default_match = 1.0;
    double target_match = 100.0;                  // score for the reserved :target key
    std::map<std::string, double> type_match;     // per annotation type override (lowercased)
    double mismatch = -1.0;                       // diagonal step between non-matching atoms
    double gap_penalty = 2.0;                     // per skipped atom, either grid
    Combine combine = Combine::Sum;               // how co-occurring pair scores combine

    double match_score(const ElementKey& key) const {
        if (key.type == kTargetType)
            return target_match;
        auto it = type_match.find(key.type);
        return it == type_match.end() ? default_match : it->second;
    }

    void validate() const {
        if (target_match < default_match)
            throw std::invalid_argument("scoring: target match score must be >= default match score");
        if (gap_penalty < 0)
            throw std::invalid_argument("scoring: gap penalty must be non-negative");
    }
};

enum class LinkKind : std::uint8_t { None, Span, Mismatch, SkipX, SkipY };

/// Match rectangle between elements starting at (terminal_i, terminal_j).
/// `keys` are the co-occurring matched keys sharing this exact rectangle,
/// `contribution` their combined match score, `score` the value stored at the
/// span's origin (terminal cell score + contribution).
struct Span {
    int terminal_i = 0, terminal_j = 0;
    int origin_i = 0, origin_j = 0;
    double contribution = 0;
    double score = 0;
    std::vector<ElementKey> keys;

    int x_len() const { return origin_i - terminal_i; }
    int y_len() const { return origin_j - terminal_j; }
};

struct AlignmentMatrix {
    struct Cell {
        double score = 0;
        LinkKind link = LinkKind::None;
        int span_id = -1;
    };

    int x_size = 0;  // |X| + 1
    int y_size = 0;  // |Y| + 1
    std::vector<Cell> cells;
    std::vector<Span> spans;

    Cell& at(int i, int j) { return cells[static_cast<size_t>(i) * y_size + j]; }
    const Cell& at(int i, int j) const { return cells[static_cast<size_t>(i) * y_size + j]; }
    double score(int i, int j) const { return at(i, j).score; }
};

/// Cell with the maximum score; ties go to the smallest (i, j) lexicographically.
/// An all-zero matrix has no alignment and yields nullopt.
inline std::optional<std::pair<int, int>> global_max(const AlignmentMatrix& m) {
    double best = 0;
    std::optional<std::pair<int, int>> cell;
    for (int i = 0; i < m.x_size; ++i)
        for (int j = 0; j < m.y_size; ++j)
            if (m.score(i, j) > best) {
                best = m.score(i, j);
                cell = {i, j};
            }
    return cell;
}

/// One matched rectangle of the final alignment with its co-occurring keys.
struct AlignedElement {
    int x_start = 0, x_len = 0;
    int y_start = 0, y_len = 0;
    std::vector<ElementKey> keys;  // sorted, unique
};

struct Alignment {
    std::vector<AlignedElement> elements;  // strictly increasing in both grids
    double score = 0;

    bool empty() const { return elements.empty(); }

    /// Atoms skipped between elements k-1 and k, in X and Y. Zero for k == 0.
    std::pair<int, int> gap_before(size_t k) const {
        if (k == 0 || k >= elements.size())
            return {0, 0};
        const AlignedElement& prev = elements[k - 1];
        const AlignedElement& cur = elements[k];
        return {cur.x_start - (prev.x_start + prev.x_len),
                cur.y_start - (prev.y_start + prev.y_len)};
    }
};

struct AlignmentResult {
    AlignmentMatrix matrix;
    Alignment alignment;
};

namespace detail {

struct Candidate {
    double value = 0;
    LinkKind kind = LinkKind::None;
    int span_id = -1;
};

// Tie order: span entry beats a mismatch step beats skipping an X atom beats
// skipping a Y atom. Deterministic backtracking depends on this.
inline int link_rank(LinkKind k) {
    switch (k) {
        case LinkKind::Span: return 4;
        case LinkKind::Mismatch: return 3;
        case LinkKind::SkipX: return 2;
        case LinkKind::SkipY: return 1;
        default: return 0;
    }
}

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value)
        return a.value > b.value;
    return link_rank(a.kind) > link_rank(b.kind);
}

}  // namespace detail

/// Full forward pass + backtrack. Returns the filled matrix and the alignment
/// recovered from the globally maximal cell. Empty grids produce an empty
/// alignment with score 0.
inline AlignmentResult align_full(const AnnotationGrid& X, const AnnotationGrid& Y,
                                  const ScoringConfig& cfg) {
    cfg.validate();
    const int n = X.length;
    const int m = Y.length;

    AlignmentResult result;
    AlignmentMatrix& mat = result.matrix;
    mat.x_size = n + 1;
    mat.y_size = m + 1;
    mat.cells.assign(static_cast<size_t>(mat.x_size) * mat.y_size, {});

    // Candidates registered at their origin cell while sweeping terminals.
    std::vector<std::vector<detail::Candidate>> pending(mat.cells.size());
    auto flat = [&](int i, int j) { return static_cast<size_t>(i) * mat.y_size + j; };

    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= m; ++j) {
            detail::Candidate best;  // value 0, kind None
            for (const detail::Candidate& c : pending[flat(i, j)])
                if (detail::better(c, best) && c.value > 0)
                    best = c;
            if (i > 0) {
                detail::Candidate c{mat.score(i - 1, j) - cfg.gap_penalty, LinkKind::SkipX, -1};
                if (detail::better(c, best) && c.value > 0)
                    best = c;
            }
            if (j > 0) {
                detail::Candidate c{mat.score(i, j - 1) - cfg.gap_penalty, LinkKind::SkipY, -1};
                if (detail::better(c, best) && c.value > 0)
                    best = c;
            }
            AlignmentMatrix::Cell& cell = mat.at(i, j);
            if (best.value > 0) {
                cell.score = best.value;
                cell.link = best.kind;
                cell.span_id = best.span_id;
            }

            if (i == n || j == m)
                continue;

            // Mismatch: a diagonal step between the atoms at (i, j). Higher
            // level elements never mismatch; they simply fail to match.
            pending[flat(i + 1, j + 1)].push_back(
                {cell.score + cfg.mismatch, LinkKind::Mismatch, -1});

            // Matching pairs grouped by rectangle: keys present with length
            // lx at X[i] and ly at Y[j] on both sides co-occur on one span.
            std::map<std::pair<int, int>, std::vector<ElementKey>> rects;
            for (const GridElement& x : X.at(i)) {
                for (const GridElement& y : Y.at(j)) {
                    if (x.key != y.key)
                        continue;
                    if (i + x.len > n || j + y.len > m)
                        continue;  // cannot happen for a valid grid, but stay safe
                    rects[{x.len, y.len}].push_back(x.key);
                }
            }
            for (auto& [lens, keys] : rects) {
                std::sort(keys.begin(), keys.end());
                keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
                double combined = 0;
                for (const ElementKey& k : keys) {
                    const double s = cfg.match_score(k);
                    combined = (cfg.combine == ScoringConfig::Combine::Sum)
                                   ? combined + s
                                   : std::max(combined, s);
                }
                Span span;
                span.terminal_i = i;
                span.terminal_j = j;
                span.origin_i = i + lens.first;
                span.origin_j = j + lens.second;
                span.contribution = combined;
                span.score = cell.score + combined;
                span.keys = std::move(keys);
                const int id = static_cast<int>(mat.spans.size());
                mat.spans.push_back(std::move(span));
                pending[flat(mat.spans.back().origin_i, mat.spans.back().origin_j)].push_back(
                    {mat.spans.back().score, LinkKind::Span, id});
            }
        }
    }

    // Backtrack from the global maximum, span to span, until a zero score.
    Alignment& out = result.alignment;
    const auto start = global_max(mat);
    if (!start)
        return result;
    out.score = mat.score(start->first, start->second);

    int i = start->first;
    int j = start->second;
    std::vector<AlignedElement> reversed;
    while (mat.score(i, j) > 0) {
        const AlignmentMatrix::Cell& cell = mat.at(i, j);
        if (cell.link == LinkKind::Span) {
            const Span& sp = mat.spans[static_cast<size_t>(cell.span_id)];
            reversed.push_back({sp.terminal_i, sp.x_len(), sp.terminal_j, sp.y_len(), sp.keys});
            i = sp.terminal_i;
            j = sp.terminal_j;
        } else if (cell.link == LinkKind::Mismatch) {
            --i;
            --j;
        } else if (cell.link == LinkKind::SkipX) {
            --i;
        } else if (cell.link == LinkKind::SkipY) {
            --j;
        } else {
            break;
        }
    }
    out.elements.assign(reversed.rbegin(), reversed.rend());
    return result;
}

inline Alignment align(const AnnotationGrid& X, const AnnotationGrid& Y, const ScoringConfig& cfg) {
    return align_full(X, Y, cfg).alignment;
}

/// Debug dump: score rows (Y down, X across, including the boundary row and
/// column) followed by the span list. Used by the `matrix` CLI subcommand.
inline std::string dump_matrix(const AlignmentMatrix& m) {
    std::ostringstream os;
    for (int j = 0; j < m.y_size; ++j) {
        for (int i = 0; i < m.x_size; ++i) {
            if (i)
                os << '\t';
            const double v = m.score(i, j);
            if (v == static_cast<long long>(v))
                os << static_cast<long long>(v);
            else
                os << v;
        }
        os << '\n';
    }
    os << "spans: " << m.spans.size() << '\n';
    for (const Span& s : m.spans) {
        os << "  (" << s.terminal_i << ',' << s.terminal_j << ")->(" << s.origin_i << ','
           << s.origin_j << ") score=" << s.score << " keys=" << s.keys.size() << '\n';
    }
    return os.str();
}

}  // namespace alignex
