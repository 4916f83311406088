#pragma once

// Ranking metrics against a ground-truth adjacency, thresholding, and
// group-level connectivity summaries.

#include "granger.hpp"
#include "series.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mcgc {

struct ScoredEntry {
    double score;
    bool positive;
};

/// Entries in row-major order, optionally skipping the diagonal.
inline std::vector<ScoredEntry> evaluated_entries(const Matrix& scores, const AdjacencyMatrix& truth,
                                                  bool include_diagonal) {
    if (scores.rows() != truth.entries.rows() || scores.cols() != truth.entries.cols())
        throw std::invalid_argument("score and truth shapes differ");
    if (!truth.is_binary()) throw std::invalid_argument("non-binary ground truth");
    std::vector<ScoredEntry> out;
    for (Eigen::Index r = 0; r < scores.rows(); ++r)
        for (Eigen::Index c = 0; c < scores.cols(); ++c) {
            if (r == c && !include_diagonal) continue;
            out.push_back({scores(r, c), truth.entries(r, c) == 1.0});
        }
    return out;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> class_counts(const std::vector<ScoredEntry>& entries, const char* metric) {
    std::size_t pos = 0;
    for (const auto& e : entries) pos += e.positive ? 1 : 0;
    const std::size_t neg = entries.size() - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument(std::string("undefined ") + metric + ": single-class truth");
    return {pos, neg};
}

}  // namespace detail

/// Mann-Whitney AUROC with ties counted one half, via average ranks.
inline double auroc(const std::vector<ScoredEntry>& entries) {
    const auto [pos, neg] = detail::class_counts(entries, "AUROC");
    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return entries[a].score < entries[b].score; });
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && entries[order[j]].score == entries[order[i]].score) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k)
            if (entries[order[k]].positive) rank_sum += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double n = static_cast<double>(neg);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

/// Average precision: entries sorted by descending score, ties kept in entry
/// order (stable), then the mean over positives of precision at their rank.
inline double auprc(const std::vector<ScoredEntry>& entries) {
    const auto [pos, neg] = detail::class_counts(entries, "AUPRC");
    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return entries[a].score > entries[b].score; });
    double hits = 0.0;
    double sum = 0.0;
    for (std::size_t rank = 1; rank <= order.size(); ++rank) {
        if (!entries[order[rank - 1]].positive) continue;
        hits += 1.0;
        sum += hits / static_cast<double>(rank);
    }
    return sum / static_cast<double>(pos);
}

inline double auroc(const GcScoreMatrix& scores, const AdjacencyMatrix& truth, bool include_diagonal) {
    return auroc(evaluated_entries(scores.scores, truth, include_diagonal));
}

inline double auprc(const GcScoreMatrix& scores, const AdjacencyMatrix& truth, bool include_diagonal) {
    return auprc(evaluated_entries(scores.scores, truth, include_diagonal));
}

struct MetricReport {
    double auroc = 0.0;
    double auprc = 0.0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    bool diagonal_included = true;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MetricReport, auroc, auprc, n_positive, n_negative, diagonal_included)

inline MetricReport evaluate(const GcScoreMatrix& scores, const AdjacencyMatrix& truth, bool include_diagonal) {
    const auto entries = evaluated_entries(scores.scores, truth, include_diagonal);
    const auto [pos, neg] = detail::class_counts(entries, "metrics");
    return {auroc(entries), auprc(entries), pos, neg, include_diagonal};
}

/// Binary matrix with 1 where score > tau.
inline AdjacencyMatrix threshold_matrix(const Matrix& scores, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
    return {(scores.array() > tau).cast<double>().matrix()};
}

/// Entrywise mean over subjects.
inline Matrix group_mean_connectivity(const std::vector<Matrix>& matrices) {
    if (matrices.empty()) throw std::invalid_argument("no matrices to average");
    Matrix sum = Matrix::Zero(matrices.front().rows(), matrices.front().cols());
    for (const auto& m : matrices) {
        if (m.rows() != sum.rows() || m.cols() != sum.cols()) throw std::invalid_argument("matrix shape mismatch");
        sum += m;
    }
    return sum / static_cast<double>(matrices.size());
}

inline GcScoreMatrix group_mean_connectivity(const std::vector<GcScoreMatrix>& matrices) {
    std::vector<Matrix> raw;
    raw.reserve(matrices.size());
    for (const auto& m : matrices) raw.push_back(m.scores);
    return {group_mean_connectivity(raw), matrices.empty() || matrices.front().diagonal_included};
}

struct ThresholdCurve {
    std::vector<double> thresholds;
    std::vector<std::size_t> counts;
};

inline ThresholdCurve connections_vs_threshold(const Matrix& scores, const std::vector<double>& thresholds,
                                               bool include_diagonal = true) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw std::invalid_argument("thresholds must be ascending");
    ThresholdCurve curve{thresholds, {}};
    for (double tau : thresholds) {
        std::size_t count = 0;
        for (Eigen::Index r = 0; r < scores.rows(); ++r)
            for (Eigen::Index c = 0; c < scores.cols(); ++c)
                if ((include_diagonal || r != c) && scores(r, c) > tau) ++count;
        curve.counts.push_back(count);
    }
    return curve;
}

/// 0.50, 0.55, ..., 0.95
inline std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    for (int k = 10; k <= 19; ++k) grid.push_back(k * 0.05);
    return grid;
}

enum class EdgeDifference : int { same = 0, only_in_a = 1, only_in_b = 2 };

using DifferenceMask = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

inline DifferenceMask difference_mask(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
    if (a.entries.rows() != b.entries.rows() || a.entries.cols() != b.entries.cols())
        throw std::invalid_argument("difference mask needs equal shapes");
    if (!a.is_binary() || !b.is_binary()) throw std::invalid_argument("difference mask needs binary matrices");
    DifferenceMask out(a.entries.rows(), a.entries.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            const bool in_a = a.entries(r, c) == 1.0;
            const bool in_b = b.entries(r, c) == 1.0;
            out(r, c) = static_cast<int>(in_a == in_b ? EdgeDifference::same
                                         : in_a      ? EdgeDifference::only_in_a
                                                     : EdgeDifference::only_in_b);
        }
    return out;
}

}  // namespace mcgc
