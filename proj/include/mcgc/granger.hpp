#pragma once

// Granger-causality extraction from a trained joint regressor.
//
// For a candidate edge i -> j, Q Monte-Carlo dropout passes are made over the
// test set with all inputs and Q more with channel i masked, pass q of both
// using the same dropout seed. Each pass is reduced to one number, the test
// MSE on channel j. An overlap classifier then measures how separable the two
// samples are; the score is the mean over reduced samples of
// 1 - P(full | e), flipped to 1 - raw when masking i lowered the error.

#include "mlp.hpp"
#include "overlap_classifier.hpp"
#include "series.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mcgc {

inline constexpr int kDefaultPasses = 100;

struct ResidualPair {
    Vector full;     // per-pass test MSE with all inputs
    Vector reduced;  // per-pass test MSE with the cause masked
    int target = 0;
    int cause = 0;

    void validate() const {
        if (full.size() < 2 || full.size() != reduced.size())
            throw std::invalid_argument("residual vectors must have equal length >= 2");
        if (!full.allFinite() || !reduced.allFinite() || (full.array() < 0).any() || (reduced.array() < 0).any())
            throw std::invalid_argument("residual samples must be finite and non-negative");
    }
};

namespace detail {

inline void check_extraction_inputs(const MlpRegressor& model, const LaggedDataset& test_set,
                                    std::span<const std::uint64_t> seeds) {
    model.validate();
    if (test_set.samples() == 0) throw std::invalid_argument("empty test set");
    if (test_set.inputs.cols() != model.input_width() || test_set.targets.cols() != model.channels())
        throw std::invalid_argument("test set shape does not match model");
    if (seeds.size() < 2) throw std::invalid_argument("need at least two forward passes");
}

/// Q x P matrix: row q holds the per-channel test MSE of pass q.
inline Matrix per_pass_channel_mse(const MlpRegressor& model, const LaggedDataset& test_set, const InputMask& mask,
                                   std::span<const std::uint64_t> seeds) {
    Matrix out(static_cast<Eigen::Index>(seeds.size()), model.channels());
    const double n = static_cast<double>(test_set.samples());
    for (std::size_t q = 0; q < seeds.size(); ++q) {
        const Matrix pred = forward(model, test_set.inputs, mask, DropoutState{seeds[q]});
        out.row(static_cast<Eigen::Index>(q)) = (pred - test_set.targets).colwise().squaredNorm() / n;
    }
    return out;
}

}  // namespace detail

inline ResidualPair residual_distributions(const MlpRegressor& model, const LaggedDataset& test_set, int cause,
                                           int target, std::span<const std::uint64_t> seeds) {
    detail::check_extraction_inputs(model, test_set, seeds);
    if (cause < 0 || cause >= model.channels() || target < 0 || target >= model.channels())
        throw std::invalid_argument("channel index out of range");
    const Matrix full = detail::per_pass_channel_mse(model, test_set, InputMask::all(model.channels()), seeds);
    const Matrix reduced =
        detail::per_pass_channel_mse(model, test_set, InputMask::without(model.channels(), cause), seeds);
    return {full.col(target), reduced.col(target), target, cause};
}

struct EdgeScore {
    double score = 0.5;
    double raw = 0.5;  // mean over reduced samples of 1 - P(full | e)
    OverlapClassifier classifier;
};

inline EdgeScore score_edge(const ResidualPair& pair) {
    pair.validate();
    const std::span<const double> full(pair.full.data(), static_cast<std::size_t>(pair.full.size()));
    const std::span<const double> reduced(pair.reduced.data(), static_cast<std::size_t>(pair.reduced.size()));
    EdgeScore out;
    out.classifier = fit_overlap_classifier(full, reduced);
    double sum = 0.0;
    for (double e : reduced) sum += 1.0 - out.classifier.probability_full(e);
    out.raw = sum / static_cast<double>(reduced.size());
    out.score = pair.reduced.mean() > pair.full.mean() ? out.raw : 1.0 - out.raw;
    return out;
}

/// Score in [0, 1] that `pair.cause` Granger-causes `pair.target`.
inline double gc_probability(const ResidualPair& pair) { return score_edge(pair).score; }

/// scores(j, i) is the score for i -> j (rows are effects, columns causes).
struct GcScoreMatrix {
    Matrix scores;
    bool diagonal_included = true;
};

/// Scores every ordered pair, including i == j. The Q full-input passes are
/// computed once and shared by all causes; `threads` > 1 splits causes
/// across worker threads without changing the result.
inline GcScoreMatrix gc_matrix(const MlpRegressor& model, const LaggedDataset& test_set,
                               std::span<const std::uint64_t> seeds, int threads = 1) {
    detail::check_extraction_inputs(model, test_set, seeds);
    const int p = model.channels();
    const Matrix full = detail::per_pass_channel_mse(model, test_set, InputMask::all(p), seeds);
    GcScoreMatrix out{Matrix::Zero(p, p), true};

    auto score_cause = [&](int cause) {
        const Matrix reduced = detail::per_pass_channel_mse(model, test_set, InputMask::without(p, cause), seeds);
        for (int target = 0; target < p; ++target) {
            out.scores(target, cause) = gc_probability({full.col(target), reduced.col(target), target, cause});
        }
    };

    const int workers = std::max(1, std::min(threads, p));
    if (workers == 1) {
        for (int cause = 0; cause < p; ++cause) score_cause(cause);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int cause = w; cause < p; cause += workers) score_cause(cause);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace mcgc
