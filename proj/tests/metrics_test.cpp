#include "mcgc/metrics.hpp"
#include "mcgc/random.hpp"

#include <gtest/gtest.h>

using namespace mcgc;

namespace {

std::vector<ScoredEntry> entries(std::vector<double> pos, std::vector<double> neg) {
    std::vector<ScoredEntry> e;
    for (double s : pos) e.push_back({s, true});
    for (double s : neg) e.push_back({s, false});
    return e;
}

double brute_auroc(const std::vector<ScoredEntry>& e) {
    double wins = 0.0, pairs = 0.0;
    for (const auto& a : e)
        for (const auto& b : e) {
            if (!a.positive || b.positive) continue;
            pairs += 1.0;
            wins += a.score > b.score ? 1.0 : (a.score == b.score ? 0.5 : 0.0);
        }
    return wins / pairs;
}

/// Rank of entry k = 1 + #entries ahead of it (higher score, or equal score
/// and earlier index). Precision at a positive is #positives ranked at or
/// above it over its rank.
double brute_auprc(const std::vector<ScoredEntry>& e) {
    auto rank_of = [&](std::size_t k) {
        std::size_t ahead = 0;
        for (std::size_t m = 0; m < e.size(); ++m)
            if (e[m].score > e[k].score || (e[m].score == e[k].score && m < k)) ++ahead;
        return ahead + 1;
    };
    double sum = 0.0, pos = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (!e[k].positive) continue;
        pos += 1.0;
        const auto r = rank_of(k);
        double hits = 0.0;
        for (std::size_t m = 0; m < e.size(); ++m)
            if (e[m].positive && rank_of(m) <= r) hits += 1.0;
        sum += hits / static_cast<double>(r);
    }
    return sum / pos;
}

}  // namespace

TEST(Auroc, HandComputedExamples) {
    EXPECT_EQ(auroc(entries({0.9, 0.8}, {0.1})), 1.0);
    EXPECT_EQ(auroc(entries({0.2, 0.4}, {0.9})), 0.0);
    EXPECT_EQ(auroc(entries({0.5}, {0.5})), 0.5);
}

TEST(Auroc, SingleClassIsUndefined) {
    try {
        auroc(entries({0.1, 0.2}, {}));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("undefined AUROC"), std::string::npos);
    }
    EXPECT_THROW(auprc(entries({}, {0.3})), std::invalid_argument);
}

TEST(Auprc, HandComputedExamples) {
    std::vector<double> neg(9, 0.1);
    EXPECT_DOUBLE_EQ(auprc(entries({0.9}, neg)), 1.0);
    EXPECT_DOUBLE_EQ(auprc(entries({0.05}, neg)), 0.1);
    // positives at ranks 1 and 3 of 4
    EXPECT_DOUBLE_EQ(auprc(entries({0.9, 0.5}, {0.7, 0.1})), (1.0 + 2.0 / 3.0) / 2.0);
}

TEST(Auprc, TiesBrokenByEntryOrder) {
    // Tied scores: the earlier entry ranks first.
    EXPECT_DOUBLE_EQ(auprc({{0.5, true}, {0.5, false}}), 1.0);
    EXPECT_DOUBLE_EQ(auprc({{0.5, false}, {0.5, true}}), 0.5);
}

TEST(Metrics, MatrixDiagonalHandling) {
    Matrix scores(2, 2);
    scores << 0.9, 0.2, 0.8, 0.95;
    AdjacencyMatrix truth{(Matrix(2, 2) << 1, 0, 1, 1).finished()};
    const auto with = evaluate({scores, true}, truth, true);
    EXPECT_EQ(with.n_positive, 3u);
    EXPECT_EQ(with.n_negative, 1u);
    EXPECT_EQ(with.auroc, 1.0);
    const auto without = evaluate({scores, true}, truth, false);
    EXPECT_EQ(without.n_positive, 1u);
    EXPECT_EQ(without.n_negative, 1u);
    EXPECT_FALSE(without.diagonal_included);
    AdjacencyMatrix diag_only{Matrix::Identity(2, 2)};
    EXPECT_THROW(evaluate({scores, true}, diag_only, false), std::invalid_argument);
}

TEST(Metrics, AgreeWithBruteForceOracle) {
    Rng rng(2024);
    int evaluated = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Matrix scores(6, 6);
        AdjacencyMatrix truth{Matrix::Zero(6, 6)};
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) {
                // coarse grid forces ties
                scores(r, c) = static_cast<double>(uniform_index(rng, 11)) / 10.0;
                truth.entries(r, c) = uniform01(rng) < 0.3 ? 1.0 : 0.0;
            }
        const bool diag = trial % 2 == 0;
        const auto e = evaluated_entries(scores, truth, diag);
        const auto pos = std::count_if(e.begin(), e.end(), [](auto& x) { return x.positive; });
        if (pos == 0 || pos == static_cast<long>(e.size())) continue;
        ++evaluated;
        EXPECT_LT(std::abs(auroc({scores, true}, truth, diag) - brute_auroc(e)), 1e-12);
        EXPECT_LT(std::abs(auprc({scores, true}, truth, diag) - brute_auprc(e)), 1e-12);
    }
    EXPECT_GT(evaluated, 990);
}

TEST(Auroc, InvariantUnderMonotoneTransformAndComplement) {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ScoredEntry> e;
        for (int k = 0; k < 20; ++k) e.push_back({uniform01(rng), k % 3 == 0});
        auto transformed = e;
        auto flipped = e;
        for (auto& x : transformed) x.score = std::exp(3.0 * x.score) - 7.0;
        for (auto& x : flipped) x.score = 1.0 - x.score;
        EXPECT_NEAR(auroc(transformed), auroc(e), 1e-15);
        EXPECT_NEAR(auroc(e) + auroc(flipped), 1.0, 1e-12);
    }
}

TEST(Threshold, StrictInequality) {
    Matrix s(2, 2);
    s << 0.0, 0.3, 0.85, 0.8;
    EXPECT_EQ(threshold_matrix(s, 0.0).entries, (Matrix(2, 2) << 0, 1, 1, 1).finished());
    EXPECT_TRUE(threshold_matrix(s, 0.85).entries.isZero(0.0));
    EXPECT_THROW(threshold_matrix(s, 1.5), std::invalid_argument);
}

TEST(GroupMean, Basics) {
    const Matrix a = Matrix::Constant(3, 3, 0.7);
    EXPECT_LT((group_mean_connectivity(std::vector<Matrix>{a, a, a}) - a).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(group_mean_connectivity(std::vector<Matrix>{Matrix::Zero(2, 2), Matrix::Ones(2, 2)}),
              Matrix::Constant(2, 2, 0.5));
    EXPECT_THROW(group_mean_connectivity(std::vector<Matrix>{Matrix::Zero(2, 2), Matrix::Zero(3, 3)}),
                 std::invalid_argument);
    EXPECT_THROW(group_mean_connectivity(std::vector<Matrix>{}), std::invalid_argument);
}

TEST(GroupMean, ThresholdOfMeanDiffersFromMeanOfThresholds) {
    // Two subjects at 0.8 and 0.95: the mean (0.875) survives a 0.85 cut,
    // while averaging the binarized matrices gives 0.5.
    const std::vector<Matrix> subjects{Matrix::Constant(1, 1, 0.8), Matrix::Constant(1, 1, 0.95)};
    EXPECT_EQ(threshold_matrix(group_mean_connectivity(subjects), 0.85).entries(0, 0), 1.0);
    const std::vector<Matrix> binarized{threshold_matrix(subjects[0], 0.85).entries,
                                        threshold_matrix(subjects[1], 0.85).entries};
    EXPECT_EQ(group_mean_connectivity(binarized)(0, 0), 0.5);
}

TEST(ThresholdCurve, CountsAndMonotonicity) {
    Rng rng(1);
    Matrix s(5, 5);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) s(r, c) = uniform01(rng);
    const auto curve = connections_vs_threshold(s, {-1e-9, 0.2, 0.5, 0.9, 1.0});
    EXPECT_EQ(curve.counts.front(), 25u);
    EXPECT_EQ(curve.counts.back(), 0u);
    EXPECT_EQ(connections_vs_threshold(s, {-1e-9}, false).counts.front(), 20u);
    for (std::size_t k = 1; k < curve.counts.size(); ++k) EXPECT_LE(curve.counts[k], curve.counts[k - 1]);
    EXPECT_THROW(connections_vs_threshold(s, {0.5, 0.2}), std::invalid_argument);
    const auto grid = default_threshold_grid();
    ASSERT_EQ(grid.size(), 10u);
    EXPECT_DOUBLE_EQ(grid.front(), 0.5);
    EXPECT_DOUBLE_EQ(grid.back(), 0.95);
}

TEST(DifferenceMask, Cases) {
    AdjacencyMatrix a{(Matrix(2, 2) << 1, 0, 1, 1).finished()};
    EXPECT_TRUE(difference_mask(a, a).isZero());
    AdjacencyMatrix comp{(Matrix::Ones(2, 2) - a.entries)};
    EXPECT_TRUE((difference_mask(a, comp).array() != 0).all());
    AdjacencyMatrix fewer = a;
    fewer.entries(1, 0) = 0.0;
    const auto d = difference_mask(a, fewer);
    EXPECT_EQ((d.array() == static_cast<int>(EdgeDifference::only_in_a)).count(), 1);
    EXPECT_EQ(d(1, 0), static_cast<int>(EdgeDifference::only_in_a));
    EXPECT_EQ(difference_mask(fewer, a)(1, 0), static_cast<int>(EdgeDifference::only_in_b));
    AdjacencyMatrix soft{Matrix::Constant(2, 2, 0.5)};
    EXPECT_THROW(difference_mask(a, soft), std::invalid_argument);
}
