#pragma once

// Training regimes, minibatch Adam, and a finite-difference gradient oracle.
//
//   NoILD : MSE of the full-input pass.
//   DPILD : MSE of the full-input pass + MSE of a channel-masked pass.
//   ILD   : MSE of a channel-masked pass only.
//
// Hidden dropout is on in every regime. One input mask is drawn per
// minibatch. In DPILD the two passes draw independent hidden-dropout seeds.

#include "mlp.hpp"
#include "random.hpp"
#include "series.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcgc {

enum class Regime { no_ild, dp_ild, ild };

NLOHMANN_JSON_SERIALIZE_ENUM(Regime, {{Regime::no_ild, "NoILD"}, {Regime::dp_ild, "DPILD"}, {Regime::ild, "ILD"}})

inline std::string regime_name(Regime r) { return nlohmann::json(r).get<std::string>(); }

inline Regime parse_regime(const std::string& s) {
    if (s == "NoILD" || s == "no-ild" || s == "noild") return Regime::no_ild;
    if (s == "DPILD" || s == "dp-ild" || s == "dpild") return Regime::dp_ild;
    if (s == "ILD" || s == "ild") return Regime::ild;
    throw std::invalid_argument("unknown regime '" + s + "' (expected NoILD, DPILD or ILD)");
}

class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Mean of squared differences over every entry.
inline double mean_squared_error(const Matrix& predictions, const Matrix& targets) {
    return (predictions - targets).squaredNorm() / static_cast<double>(targets.size());
}

/// The random quantities one loss evaluation consumes.
struct LossDraws {
    std::optional<DropoutState> full_dropout;
    std::optional<DropoutState> masked_dropout;
    InputMask mask;
};

inline LossDraws draw_loss_inputs(Regime regime, int channels, Rng& rng) {
    LossDraws d{DropoutState{rng()}, std::nullopt, InputMask::all(channels)};
    if (regime != Regime::no_ild) {
        d.mask = sample_input_mask(channels, rng);
        d.masked_dropout = regime == Regime::dp_ild ? DropoutState{rng()} : *d.full_dropout;
    }
    return d;
}

struct LossResult {
    double loss = 0.0;
    Vector gradient;
};

inline LossResult compute_loss(const MlpRegressor& model, const Matrix& inputs, const Matrix& targets, Regime regime,
                               const LossDraws& draws) {
    if (inputs.rows() == 0) throw std::invalid_argument("empty batch");
    if (targets.rows() != inputs.rows() || targets.cols() != model.channels())
        throw std::invalid_argument("target shape does not match batch");
    const double scale = 2.0 / static_cast<double>(targets.size());
    LossResult result{0.0, Vector::Zero(model.parameter_count())};
    auto add_pass = [&](const InputMask& mask, const std::optional<DropoutState>& dropout) {
        const auto trace = forward_trace(model, inputs, mask, dropout);
        result.loss += mean_squared_error(trace.output, targets);
        result.gradient += backward(model, trace, scale * (trace.output - targets));
    };
    switch (regime) {
        case Regime::no_ild: add_pass(InputMask::all(model.channels()), draws.full_dropout); break;
        case Regime::dp_ild:
            add_pass(InputMask::all(model.channels()), draws.full_dropout);
            add_pass(draws.mask, draws.masked_dropout);
            break;
        case Regime::ild: add_pass(draws.mask, draws.masked_dropout); break;
    }
    return result;
}

inline LossResult compute_loss(const MlpRegressor& model, const Matrix& inputs, const Matrix& targets, Regime regime,
                               Rng& rng) {
    return compute_loss(model, inputs, targets, regime, draw_loss_inputs(regime, model.channels(), rng));
}

struct TrainConfig {
    Regime regime = Regime::no_ild;
    int epochs = 300;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double alpha = 0.1;
    std::uint64_t seed = 0;
    int early_stop_patience = 25;  // 0 disables early stopping

    void validate() const {
        if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
        if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
            throw std::invalid_argument("Adam betas must lie in [0, 1)");
        if (!(adam_eps > 0.0)) throw std::invalid_argument("adam_eps must be positive");
        if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
        if (early_stop_patience < 0) throw std::invalid_argument("early_stop_patience must be non-negative");
    }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = {{"regime", c.regime},         {"epochs", c.epochs},   {"batch_size", c.batch_size},
         {"learning_rate", c.learning_rate}, {"beta1", c.beta1}, {"beta2", c.beta2},
         {"adam_eps", c.adam_eps},     {"alpha", c.alpha},     {"seed", c.seed},
         {"early_stop_patience", c.early_stop_patience}};
}

/// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    const TrainConfig d;
    c.regime = j.value("regime", d.regime);
    c.epochs = j.value("epochs", d.epochs);
    c.batch_size = j.value("batch_size", d.batch_size);
    c.learning_rate = j.value("learning_rate", d.learning_rate);
    c.beta1 = j.value("beta1", d.beta1);
    c.beta2 = j.value("beta2", d.beta2);
    c.adam_eps = j.value("adam_eps", d.adam_eps);
    c.alpha = j.value("alpha", d.alpha);
    c.seed = j.value("seed", d.seed);
    c.early_stop_patience = j.value("early_stop_patience", d.early_stop_patience);
}

struct TrainHistory {
    std::vector<double> train_loss;  // mean regime loss over minibatches
    std::vector<double> val_mse;     // deterministic full-input MSE
    int best_epoch = -1;             // index into val_mse, -1 if no epoch ran
    bool stopped_early = false;
};

struct TrainResult {
    MlpRegressor model;
    TrainHistory history;
};

class Adam {
  public:
    Adam(Eigen::Index n, double lr, double beta1, double beta2, double eps)
        : m_(Vector::Zero(n)), v_(Vector::Zero(n)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

    void step(Vector& params, const Vector& grad) {
        ++t_;
        m_ = b1_ * m_ + (1.0 - b1_) * grad;
        v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
    }

  private:
    Vector m_, v_;
    double lr_, b1_, b2_, eps_;
    long t_ = 0;
};

/// Minibatch Adam. Every random draw (shuffles, dropout seeds, masks) comes
/// from one generator seeded with config.seed. Returns the parameters of the
/// epoch with the lowest validation MSE when a validation set is given.
inline TrainResult train(MlpRegressor model, const LaggedDataset& train_set, const LaggedDataset& val_set,
                         const TrainConfig& config) {
    config.validate();
    model.dropout_rate = config.alpha;
    model.validate();
    if (train_set.inputs.cols() != model.input_width() || train_set.targets.cols() != model.channels())
        throw std::invalid_argument("training set shape does not match model");
    if (train_set.samples() == 0 && config.epochs > 0) throw std::invalid_argument("empty training set");
    const bool have_val = val_set.samples() > 0;
    if (have_val && (val_set.inputs.cols() != model.input_width() || val_set.targets.cols() != model.channels()))
        throw std::invalid_argument("validation set shape does not match model");

    TrainResult result{model, {}};
    Rng rng(config.seed);
    Vector params = model.parameters();
    Adam adam(params.size(), config.learning_rate, config.beta1, config.beta2, config.adam_eps);

    const Eigen::Index n = train_set.samples();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    Matrix batch_x, batch_y;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order, rng);
        double loss_sum = 0.0;
        int batches = 0;
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index rows = std::min<Eigen::Index>(config.batch_size, n - start);
            batch_x.resize(rows, train_set.inputs.cols());
            batch_y.resize(rows, train_set.targets.cols());
            for (Eigen::Index r = 0; r < rows; ++r) {
                batch_x.row(r) = train_set.inputs.row(order[static_cast<std::size_t>(start + r)]);
                batch_y.row(r) = train_set.targets.row(order[static_cast<std::size_t>(start + r)]);
            }
            const auto lr = compute_loss(model, batch_x, batch_y, config.regime, rng);
            if (!std::isfinite(lr.loss) || !lr.gradient.allFinite())
                throw NumericError("training diverged at epoch " + std::to_string(epoch));
            adam.step(params, lr.gradient);
            model.set_parameters(params);
            loss_sum += lr.loss;
            ++batches;
        }
        result.history.train_loss.push_back(loss_sum / batches);
        if (!have_val) {
            result.model = model;
            continue;
        }
        const double val = mean_squared_error(forward(model, val_set.inputs), val_set.targets);
        if (!std::isfinite(val)) throw NumericError("validation loss diverged at epoch " + std::to_string(epoch));
        result.history.val_mse.push_back(val);
        if (val < best_val) {
            best_val = val;
            since_best = 0;
            result.model = model;
            result.history.best_epoch = epoch;
        } else if (config.early_stop_patience > 0 && ++since_best >= config.early_stop_patience) {
            result.history.stopped_early = true;
            break;
        }
    }
    return result;
}

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::vector<Eigen::Index> checked;
};

/// Compares backprop against the fourth-order central difference
/// (8[L(+h) - L(-h)] - [L(+2h) - L(-2h)]) / 12h on `samples` randomly chosen
/// parameters (all parameters when samples <= 0). Relative error is
/// |g_bp - g_fd| / max(|g_bp|, |g_fd|), and 0 when both are exactly zero.
/// For relu the step must stay below the kink margin of every
/// pre-activation (see min_abs_preactivation).
inline GradCheckResult grad_check(const MlpRegressor& model, const Matrix& inputs, const Matrix& targets,
                                  Regime regime, const LossDraws& draws, int samples, std::uint64_t seed,
                                  double h = 1e-3) {
    const Vector analytic = compute_loss(model, inputs, targets, regime, draws).gradient;
    const Eigen::Index n = analytic.size();
    GradCheckResult result;
    if (samples <= 0 || samples >= n) {
        result.checked.resize(static_cast<std::size_t>(n));
        std::iota(result.checked.begin(), result.checked.end(), Eigen::Index{0});
    } else {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        Rng rng(seed);
        shuffle(all, rng);
        result.checked.assign(all.begin(), all.begin() + samples);
    }
    MlpRegressor probe = model;
    const Vector base = model.parameters();
    auto loss_at = [&](Eigen::Index idx, double delta) {
        Vector p = base;
        p[idx] = base[idx] + delta;
        probe.set_parameters(p);
        return compute_loss(probe, inputs, targets, regime, draws).loss;
    };
    for (auto idx : result.checked) {
        const double fd =
            (8.0 * (loss_at(idx, h) - loss_at(idx, -h)) - (loss_at(idx, 2.0 * h) - loss_at(idx, -2.0 * h))) /
            (12.0 * h);
        const double bp = analytic[idx];
        const double scale = std::max(std::abs(bp), std::abs(fd));
        if (scale > 0.0) result.max_relative_error = std::max(result.max_relative_error, std::abs(bp - fd) / scale);
    }
    return result;
}

}  // namespace mcgc
