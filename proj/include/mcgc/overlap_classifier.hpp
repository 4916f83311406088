#pragma once

// One-dimensional logistic regression that tries to tell full-model residual
// samples (label 1) from reduced-model samples (label 0).
//
// Feature: log(e + 1e-12), centered and scaled by the pooled mean and
// standard deviation so that the L2 penalty acts on separation measured in
// pooled standard deviations rather than in raw log units. The intercept is
// not penalized. The L2 strength is chosen from a small grid by stratified
// k-fold cross-validated log-loss, then the model is refit on all samples.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace mcgc {

inline constexpr double kLogFloor = 1e-12;
inline constexpr std::array<double, 3> kL2Grid{0.01, 0.1, 1.0};
inline constexpr int kCvFolds = 5;

struct OverlapClassifier {
    double weight = 0.0;
    double intercept = 0.0;
    double l2 = 0.0;
    double feature_center = 0.0;
    double feature_scale = 1.0;
    double cv_log_loss = 0.0;
    double cv_accuracy = 0.5;

    double feature(double error) const { return (std::log(error + kLogFloor) - feature_center) / feature_scale; }

    /// P(y = 1 | e): probability that `error` came from the full model.
    double probability_full(double error) const {
        const double z = weight * feature(error) + intercept;
        return 1.0 / (1.0 + std::exp(-z));
    }
};

namespace detail {

struct LogisticFit {
    double w = 0.0;
    double b = 0.0;
};

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Log(1 + exp(-y*z)) style loss for label y in {0, 1}, stable for large |z|.
inline double log_loss_term(double z, int y) {
    const double s = y ? -z : z;  // loss = log(1 + exp(s))
    return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

/// Minimizes (1/n) sum log-loss + (l2/2) w^2 by Newton's method. The
/// objective is strictly convex in w and, given both labels are present,
/// in b; steps are damped by backtracking.
inline LogisticFit fit_logistic(std::span<const double> x, std::span<const int> y, double l2) {
    const double n = static_cast<double>(x.size());
    auto objective = [&](double w, double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += log_loss_term(w * x[i] + b, y[i]);
        return s / n + 0.5 * l2 * w * w;
    };
    LogisticFit fit;
    double f = objective(fit.w, fit.b);
    for (int iter = 0; iter < 100; ++iter) {
        double gw = l2 * fit.w, gb = 0.0, hww = l2, hwb = 0.0, hbb = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double p = sigmoid(fit.w * x[i] + fit.b);
            const double r = (p - y[i]) / n;
            const double c = p * (1.0 - p) / n;
            gw += r * x[i];
            gb += r;
            hww += c * x[i] * x[i];
            hwb += c * x[i];
            hbb += c;
        }
        const double ridge = 1e-12;
        const double det = (hww + ridge) * (hbb + ridge) - hwb * hwb;
        if (!(det > 0.0)) break;
        const double dw = ((hbb + ridge) * gw - hwb * gb) / det;
        const double db = ((hww + ridge) * gb - hwb * gw) / det;
        double step = 1.0;
        double f_new = objective(fit.w - dw, fit.b - db);
        while (f_new > f + 1e-15 && step > 1e-10) {
            step *= 0.5;
            f_new = objective(fit.w - step * dw, fit.b - step * db);
        }
        if (f_new > f + 1e-15) break;
        fit.w -= step * dw;
        fit.b -= step * db;
        const bool converged = std::abs(step * dw) < 1e-12 && std::abs(step * db) < 1e-12;
        f = f_new;
        if (converged) break;
    }
    return fit;
}

}  // namespace detail

/// Fits the classifier on full (label 1) and reduced (label 0) residual
/// samples. Folds are stratified by position within each class (sample k of
/// a class goes to fold k mod folds), so relabeling the two classes leaves
/// the fold structure unchanged.
inline OverlapClassifier fit_overlap_classifier(std::span<const double> full, std::span<const double> reduced) {
    if (full.size() < 2 || reduced.size() < 2)
        throw std::invalid_argument("overlap classifier needs at least two samples per class");

    std::vector<double> raw;
    std::vector<int> labels;
    std::vector<int> fold;
    const int folds = static_cast<int>(std::min<std::size_t>(kCvFolds, std::min(full.size(), reduced.size())));
    auto append = [&](std::span<const double> samples, int label) {
        for (std::size_t k = 0; k < samples.size(); ++k) {
            if (!(samples[k] >= 0.0) || !std::isfinite(samples[k]))
                throw std::invalid_argument("residual samples must be finite and non-negative");
            raw.push_back(std::log(samples[k] + kLogFloor));
            labels.push_back(label);
            fold.push_back(static_cast<int>(k % static_cast<std::size_t>(folds)));
        }
    };
    append(full, 1);
    append(reduced, 0);

    OverlapClassifier clf;
    const double n = static_cast<double>(raw.size());
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : raw) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    clf.feature_center = mean;
    clf.feature_scale = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;

    std::vector<double> x(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) x[i] = (raw[i] - clf.feature_center) / clf.feature_scale;

    double best_loss = std::numeric_limits<double>::infinity();
    for (double l2 : kL2Grid) {
        double loss = 0.0;
        double correct = 0.0;
        for (int f = 0; f < folds; ++f) {
            std::vector<double> xt;
            std::vector<int> yt;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (fold[i] != f) {
                    xt.push_back(x[i]);
                    yt.push_back(labels[i]);
                }
            const auto fit = detail::fit_logistic(xt, yt, l2);
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (fold[i] != f) continue;
                const double z = fit.w * x[i] + fit.b;
                loss += detail::log_loss_term(z, labels[i]);
                const double p = detail::sigmoid(z);
                correct += (p > 0.5) == (labels[i] == 1) ? 1.0 : (p == 0.5 ? 0.5 : 0.0);
            }
        }
        loss /= n;
        if (loss < best_loss - 1e-12) {
            best_loss = loss;
            clf.l2 = l2;
            clf.cv_log_loss = loss;
            clf.cv_accuracy = correct / n;
        }
    }
    const auto fit = detail::fit_logistic(x, labels, clf.l2);
    clf.weight = fit.w;
    clf.intercept = fit.b;
    return clf;
}

}  // namespace mcgc
