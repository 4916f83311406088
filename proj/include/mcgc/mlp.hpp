#pragma once

// Feedforward regressor over lag-flattened inputs with hidden-layer dropout.
//
// Layout: K*P inputs -> hidden layers -> P linear outputs. Dropout follows
// every hidden activation (inverted scaling, kept units divided by 1 - rate)
// and never touches the output layer. The only input-side "dropout" is the
// channel mask, which zeroes all K lag slots of a channel.

#include "random.hpp"
#include "series.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcgc {

enum class Activation { relu, tanh, identity };

NLOHMANN_JSON_SERIALIZE_ENUM(Activation, {{Activation::relu, "relu"},
                                          {Activation::tanh, "tanh"},
                                          {Activation::identity, "identity"}})

inline Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "identity" || s == "linear") return Activation::identity;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

/// Multi-hot channel indicator; kept[c] == 0 zeroes every lag of channel c.
struct InputMask {
    std::vector<std::uint8_t> kept;

    static InputMask all(int channels) { return {std::vector<std::uint8_t>(static_cast<std::size_t>(channels), 1)}; }

    static InputMask without(int channels, int dropped) {
        InputMask m = all(channels);
        m.kept.at(static_cast<std::size_t>(dropped)) = 0;
        return m;
    }

    int channels() const { return static_cast<int>(kept.size()); }
    int dropped_count() const { return static_cast<int>(std::count(kept.begin(), kept.end(), std::uint8_t{0})); }
    bool is_full() const { return dropped_count() == 0; }

    void validate(int expected_channels) const {
        if (channels() != expected_channels) throw std::invalid_argument("input mask width does not match channel count");
        if (dropped_count() == channels()) throw std::invalid_argument("input mask drops every channel");
    }
};

/// Draws d uniformly from {1, ..., P-1}, then a uniform d-subset of channels to drop.
inline InputMask sample_input_mask(int channels, Rng& rng) {
    if (channels < 2) throw std::invalid_argument("cannot drop channels from a single-channel series");
    const int dropped = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(channels - 1)));
    std::vector<int> order(static_cast<std::size_t>(channels));
    for (int c = 0; c < channels; ++c) order[static_cast<std::size_t>(c)] = c;
    // Partial Fisher-Yates: the first `dropped` slots are a uniform subset.
    for (int k = 0; k < dropped; ++k) {
        const auto pick = k + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(channels - k)));
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick)]);
    }
    InputMask mask = InputMask::all(channels);
    for (int k = 0; k < dropped; ++k) mask.kept[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 0;
    return mask;
}

/// Seeded hidden-dropout realization. Whether a unit is kept depends only on
/// (seed, hidden layer, batch row, unit), so two passes with the same state
/// share the same dropout pattern.
struct DropoutState {
    std::uint64_t seed = 0;

    std::uint64_t row_key(int layer, Eigen::Index row) const noexcept {
        return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(layer)) ^
                          static_cast<std::uint64_t>(row));
    }

    static bool keep(std::uint64_t row_key, Eigen::Index unit, double rate) noexcept {
        return unit_interval(splitmix64(row_key ^ static_cast<std::uint64_t>(unit) * 0xD6E8FEB86659FD93ULL)) >= rate;
    }
};

struct MlpRegressor {
    std::vector<int> layer_sizes;  // [K*P, H_1, ..., H_L, P]
    std::vector<Matrix> weights;   // layer l: in x out
    std::vector<Vector> biases;    // layer l: out
    Activation activation = Activation::relu;
    double dropout_rate = 0.1;
    int lags = 1;

    int channels() const { return layer_sizes.back(); }
    int input_width() const { return layer_sizes.front(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
    int hidden_layer_count() const { return layer_count() - 1; }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization for weights and biases.
    static MlpRegressor create(int lags, int channels, const std::vector<int>& hidden, Activation activation,
                               double dropout_rate, std::uint64_t seed) {
        if (lags < 1 || channels < 1) throw std::invalid_argument("lags and channels must be positive");
        MlpRegressor m;
        m.lags = lags;
        m.activation = activation;
        m.dropout_rate = dropout_rate;
        m.layer_sizes.push_back(lags * channels);
        for (int h : hidden) {
            if (h < 1) throw std::invalid_argument("hidden layer sizes must be positive");
            m.layer_sizes.push_back(h);
        }
        m.layer_sizes.push_back(channels);
        Rng rng(seed);
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
            const int in = m.layer_sizes[l];
            const int out = m.layer_sizes[l + 1];
            const double bound = 1.0 / std::sqrt(static_cast<double>(in));
            Matrix w(in, out);
            for (Eigen::Index c = 0; c < out; ++c)
                for (Eigen::Index r = 0; r < in; ++r) w(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
            Vector b(out);
            for (Eigen::Index c = 0; c < out; ++c) b[c] = bound * (2.0 * uniform01(rng) - 1.0);
            m.weights.push_back(std::move(w));
            m.biases.push_back(std::move(b));
        }
        m.validate();
        return m;
    }

    void validate() const {
        if (layer_sizes.size() < 2) throw std::invalid_argument("model needs at least an input and an output layer");
        if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size())
            throw std::invalid_argument("layer count mismatch");
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (weights[l].rows() != layer_sizes[l] || weights[l].cols() != layer_sizes[l + 1] ||
                biases[l].size() != layer_sizes[l + 1])
                throw std::invalid_argument("layer " + std::to_string(l) + " has inconsistent shape");
            if (!weights[l].allFinite() || !biases[l].allFinite())
                throw std::invalid_argument("model parameters must be finite");
        }
        if (lags < 1 || input_width() != lags * channels())
            throw std::invalid_argument("input width must equal lags * output channels");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
    }

    Eigen::Index parameter_count() const {
        Eigen::Index n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }

    /// Layer by layer: weights (column-major), then biases.
    Vector parameters() const {
        Vector flat(parameter_count());
        Eigen::Index off = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            flat.segment(off, weights[l].size()) = weights[l].reshaped();
            off += weights[l].size();
            flat.segment(off, biases[l].size()) = biases[l];
            off += biases[l].size();
        }
        return flat;
    }

    void set_parameters(const Vector& flat) {
        if (flat.size() != parameter_count()) throw std::invalid_argument("parameter vector has wrong length");
        Eigen::Index off = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            weights[l].reshaped() = flat.segment(off, weights[l].size());
            off += weights[l].size();
            biases[l] = flat.segment(off, biases[l].size());
            off += biases[l].size();
        }
    }
};

inline Matrix apply_input_mask(const Matrix& inputs, const InputMask& mask) {
    if (mask.is_full()) return inputs;
    Matrix out = inputs;
    const int p = mask.channels();
    for (int c = 0; c < p; ++c) {
        if (mask.kept[static_cast<std::size_t>(c)]) continue;
        for (Eigen::Index col = c; col < inputs.cols(); col += p) out.col(col).setZero();
    }
    return out;
}

namespace detail {

inline void activate(Matrix& z, Activation a) {
    switch (a) {
        case Activation::relu: z = z.cwiseMax(0.0); break;
        case Activation::tanh: z = z.array().tanh().matrix(); break;
        case Activation::identity: break;
    }
}

/// Derivative of the activation expressed through pre-activation z.
inline Matrix activation_slope(const Matrix& z, Activation a) {
    switch (a) {
        case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
        case Activation::tanh: return (1.0 - z.array().tanh().square()).matrix();
        case Activation::identity: return Matrix::Ones(z.rows(), z.cols());
    }
    throw std::logic_error("unreachable");
}

inline Matrix dropout_scale(Eigen::Index rows, Eigen::Index units, int layer, const DropoutState& state, double rate) {
    Matrix scale(rows, units);
    const double kept_value = 1.0 / (1.0 - rate);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto key = state.row_key(layer, r);
        for (Eigen::Index u = 0; u < units; ++u) scale(r, u) = DropoutState::keep(key, u, rate) ? kept_value : 0.0;
    }
    return scale;
}

}  // namespace detail

/// Intermediate values kept for backpropagation.
struct ForwardTrace {
    std::vector<Matrix> layer_inputs;     // input to layer l (after mask / dropout)
    std::vector<Matrix> preactivations;   // hidden layers only
    std::vector<Matrix> dropout_scales;   // hidden layers only; empty when dropout is off
    Matrix output;
};

inline ForwardTrace forward_trace(const MlpRegressor& model, const Matrix& inputs, const InputMask& mask,
                                  const std::optional<DropoutState>& dropout) {
    if (inputs.cols() != model.input_width())
        throw std::invalid_argument("input width " + std::to_string(inputs.cols()) + " does not match model width " +
                                    std::to_string(model.input_width()));
    mask.validate(model.channels());
    ForwardTrace trace;
    Matrix h = apply_input_mask(inputs, mask);
    const bool use_dropout = dropout.has_value() && model.dropout_rate > 0.0;
    for (int l = 0; l < model.layer_count(); ++l) {
        const auto lu = static_cast<std::size_t>(l);
        Matrix z = h * model.weights[lu];
        z.rowwise() += model.biases[lu].transpose();
        trace.layer_inputs.push_back(std::move(h));
        if (l + 1 == model.layer_count()) {
            trace.output = std::move(z);
            break;
        }
        trace.preactivations.push_back(z);
        detail::activate(z, model.activation);
        if (use_dropout) {
            Matrix scale = detail::dropout_scale(z.rows(), z.cols(), l, *dropout, model.dropout_rate);
            z.array() *= scale.array();
            trace.dropout_scales.push_back(std::move(scale));
        }
        h = std::move(z);
    }
    return trace;
}

/// Predictions N x P. `dropout` = nullopt runs the deterministic network.
inline Matrix forward(const MlpRegressor& model, const Matrix& inputs, const InputMask& mask,
                      const std::optional<DropoutState>& dropout = std::nullopt) {
    return forward_trace(model, inputs, mask, dropout).output;
}

inline Matrix forward(const MlpRegressor& model, const Matrix& inputs) {
    return forward(model, inputs, InputMask::all(model.channels()), std::nullopt);
}

/// Gradient of a loss with respect to the flattened parameters, given
/// dLoss/dOutput.
inline Vector backward(const MlpRegressor& model, const ForwardTrace& trace, Matrix grad_output) {
    Vector flat(model.parameter_count());
    std::vector<Eigen::Index> offsets;
    Eigen::Index off = 0;
    for (int l = 0; l < model.layer_count(); ++l) {
        offsets.push_back(off);
        off += model.weights[static_cast<std::size_t>(l)].size() + model.biases[static_cast<std::size_t>(l)].size();
    }
    Matrix g = std::move(grad_output);
    for (int l = model.layer_count() - 1; l >= 0; --l) {
        const auto lu = static_cast<std::size_t>(l);
        if (l + 1 < model.layer_count()) {
            if (!trace.dropout_scales.empty()) g.array() *= trace.dropout_scales[lu].array();
            g.array() *= detail::activation_slope(trace.preactivations[lu], model.activation).array();
        }
        const Matrix gw = trace.layer_inputs[lu].transpose() * g;
        const Vector gb = g.colwise().sum().transpose();
        flat.segment(offsets[lu], gw.size()) = gw.reshaped();
        flat.segment(offsets[lu] + gw.size(), gb.size()) = gb;
        if (l > 0) g = g * model.weights[lu].transpose();
    }
    return flat;
}

/// Smallest |pre-activation| across hidden units; used to keep relu gradient
/// checks away from the kink.
inline double min_abs_preactivation(const MlpRegressor& model, const Matrix& inputs, const InputMask& mask,
                                    const std::optional<DropoutState>& dropout = std::nullopt) {
    const auto trace = forward_trace(model, inputs, mask, dropout);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : trace.preactivations) m = std::min(m, z.cwiseAbs().minCoeff());
    return m;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline constexpr const char* kModelFormat = "mcgc-mlp";

inline nlohmann::json model_to_json(const MlpRegressor& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Matrix& w = model.weights[l];
        std::vector<double> wflat;
        wflat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) wflat.push_back(w(r, c));
        std::vector<double> b(model.biases[l].data(), model.biases[l].data() + model.biases[l].size());
        layers.push_back({{"inputs", w.rows()}, {"outputs", w.cols()}, {"weights", wflat}, {"bias", b}});
    }
    return {{"format", kModelFormat},
            {"version", 1},
            {"layer_sizes", model.layer_sizes},
            {"lags", model.lags},
            {"activation", model.activation},
            {"dropout_rate", model.dropout_rate},
            {"layers", layers}};
}

/// Weights are stored row-major per layer (inputs x outputs).
inline MlpRegressor model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != kModelFormat) throw std::invalid_argument("not an mcgc-mlp model file");
    MlpRegressor m;
    m.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    m.lags = j.at("lags").get<int>();
    m.activation = j.at("activation").get<Activation>();
    m.dropout_rate = j.at("dropout_rate").get<double>();
    const auto& layers = j.at("layers");
    if (layers.size() + 1 != m.layer_sizes.size()) throw std::invalid_argument("layer count does not match layer_sizes");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const int in = m.layer_sizes[l];
        const int out = m.layer_sizes[l + 1];
        const auto& layer = layers[l];
        if (layer.at("inputs").get<int>() != in || layer.at("outputs").get<int>() != out)
            throw std::invalid_argument("layer " + std::to_string(l) + " shape does not match layer_sizes");
        const auto w = layer.at("weights").get<std::vector<double>>();
        const auto b = layer.at("bias").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out) ||
            b.size() != static_cast<std::size_t>(out))
            throw std::invalid_argument("layer " + std::to_string(l) + " has the wrong number of parameters");
        Matrix wm(in, out);
        for (int r = 0; r < in; ++r)
            for (int c = 0; c < out; ++c) wm(r, c) = w[static_cast<std::size_t>(r) * out + c];
        m.weights.push_back(std::move(wm));
        m.biases.push_back(Eigen::Map<const Vector>(b.data(), out));
    }
    m.validate();
    return m;
}

}  // namespace mcgc
