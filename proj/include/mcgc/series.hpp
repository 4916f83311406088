#pragma once

// Time-series containers, lagging, chronological splitting and per-channel
// standardization.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace mcgc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// T x P observations, one row per time step.
struct MultivariateSeries {
    Matrix values;
    std::vector<std::string> channel_names;
    std::optional<double> dt;

    Eigen::Index length() const { return values.rows(); }
    Eigen::Index channels() const { return values.cols(); }

    /// Throws std::invalid_argument if the invariants (T >= 1, P >= 1,
    /// finite values, one name per channel) do not hold.
    void validate() const {
        if (values.rows() < 1) throw std::invalid_argument("empty series");
        if (values.cols() < 1) throw std::invalid_argument("series has no channels");
        if (static_cast<Eigen::Index>(channel_names.size()) != values.cols())
            throw std::invalid_argument("channel name count does not match column count");
        if (!values.allFinite()) throw std::invalid_argument("series contains non-finite values");
    }

    MultivariateSeries segment(Eigen::Index begin, Eigen::Index count) const {
        return {values.middleRows(begin, count), channel_names, dt};
    }
};

inline std::vector<std::string> default_channel_names(Eigen::Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

/// P x P Granger structure. entries(i, j) refers to the edge j -> i
/// (rows are effects, columns are causes).
struct AdjacencyMatrix {
    Matrix entries;

    Eigen::Index size() const { return entries.rows(); }

    bool is_binary() const {
        return (entries.array() == 0.0 || entries.array() == 1.0).all();
    }

    void validate(bool require_binary = false) const {
        if (entries.rows() != entries.cols()) throw std::invalid_argument("adjacency matrix is not square");
        if (!entries.allFinite() || (entries.array() < 0.0).any() || (entries.array() > 1.0).any())
            throw std::invalid_argument("adjacency entries must lie in [0, 1]");
        if (require_binary && !is_binary()) throw std::invalid_argument("non-binary ground truth");
    }
};

/// Supervised pairs for one-step-ahead prediction.
///
/// Row n of `inputs` is lag-major: columns [0, P) hold X(t-1), [P, 2P) hold
/// X(t-2), ..., [(K-1)P, KP) hold X(t-K), where t = K + n. Masking channel c
/// therefore touches columns c, P + c, 2P + c, ...
struct LaggedDataset {
    Matrix inputs;
    Matrix targets;
    int lags = 0;
    int channels = 0;

    Eigen::Index samples() const { return targets.rows(); }
};

inline LaggedDataset make_lagged_dataset(const MultivariateSeries& series, int lags) {
    if (lags < 1) throw std::invalid_argument("lag order must be positive");
    const Eigen::Index t_len = series.length();
    const Eigen::Index p = series.channels();
    if (lags >= t_len) throw std::invalid_argument("insufficient length: need more than K time steps");
    const Eigen::Index n = t_len - lags;

    LaggedDataset ds;
    ds.lags = lags;
    ds.channels = static_cast<int>(p);
    ds.inputs.resize(n, lags * p);
    ds.targets = series.values.bottomRows(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        const Eigen::Index t = lags + row;
        for (int k = 1; k <= lags; ++k) {
            ds.inputs.block(row, (k - 1) * p, 1, p) = series.values.row(t - k);
        }
    }
    return ds;
}

struct SplitSpec {
    double train_frac = 0.7;
    double val_frac = 0.1;
    double test_frac = 0.2;

    void validate() const {
        if (train_frac < 0 || val_frac < 0 || test_frac < 0)
            throw std::invalid_argument("split fractions must be non-negative");
        if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
            throw std::invalid_argument("split fractions must sum to 1");
    }
};

struct SeriesSplit {
    MultivariateSeries train;
    MultivariateSeries val;
    MultivariateSeries test;
};

/// Segment lengths: val and test get floor(frac * T); train takes the rest.
inline std::tuple<Eigen::Index, Eigen::Index, Eigen::Index> split_lengths(Eigen::Index t_len,
                                                                          const SplitSpec& spec) {
    spec.validate();
    const auto val = static_cast<Eigen::Index>(std::floor(spec.val_frac * static_cast<double>(t_len) + 1e-9));
    const auto test = static_cast<Eigen::Index>(std::floor(spec.test_frac * static_cast<double>(t_len) + 1e-9));
    const Eigen::Index train = t_len - val - test;
    if (train < 1 || val < 1 || test < 1)
        throw std::invalid_argument("split produces an empty segment (T=" + std::to_string(t_len) + ")");
    return {train, val, test};
}

inline SeriesSplit chronological_split(const MultivariateSeries& series, const SplitSpec& spec) {
    const auto [train, val, test] = split_lengths(series.length(), spec);
    return {series.segment(0, train), series.segment(train, val), series.segment(train + val, test)};
}

inline constexpr double kStdEpsilon = 1e-8;

struct StandardizationStats {
    Vector mean;
    Vector std;
};

/// Per-channel mean and sample (N-1) standard deviation; constant channels get
/// std = kStdEpsilon.
inline StandardizationStats fit_standardizer(const MultivariateSeries& train) {
    if (train.length() < 2) throw std::invalid_argument("standardizer needs at least two time steps");
    StandardizationStats stats;
    stats.mean = train.values.colwise().mean().transpose();
    const Matrix centered = train.values.rowwise() - stats.mean.transpose();
    stats.std = (centered.colwise().squaredNorm().array() / static_cast<double>(train.length() - 1))
                    .sqrt()
                    .transpose();
    for (Eigen::Index p = 0; p < stats.std.size(); ++p) {
        if (!(stats.std[p] > kStdEpsilon)) stats.std[p] = kStdEpsilon;
    }
    return stats;
}

inline MultivariateSeries apply_standardizer(const MultivariateSeries& series, const StandardizationStats& stats) {
    if (stats.mean.size() != series.channels() || stats.std.size() != series.channels())
        throw std::invalid_argument("standardizer dimension mismatch");
    MultivariateSeries out = series;
    out.values = ((series.values.rowwise() - stats.mean.transpose()).array().rowwise() /
                  stats.std.transpose().array())
                     .matrix();
    return out;
}

inline MultivariateSeries invert_standardizer(const MultivariateSeries& series, const StandardizationStats& stats) {
    if (stats.mean.size() != series.channels() || stats.std.size() != series.channels())
        throw std::invalid_argument("standardizer dimension mismatch");
    MultivariateSeries out = series;
    out.values = ((series.values.array().rowwise() * stats.std.transpose().array()).matrix().rowwise() +
                  stats.mean.transpose());
    return out;
}

}  // namespace mcgc
