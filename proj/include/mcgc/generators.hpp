#pragma once

// Synthetic benchmark data with known Granger structure: three-node
// autoregressive triads, sparse stable VAR(K), and Lorenz-96. Every generator
// is a pure function of its spec (including the seed).

#include "csv_io.hpp"
#include "random.hpp"
#include "series.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcgc {

inline constexpr int kGeneratorBurnIn = 200;

// ---------------------------------------------------------------------------
// Triads
// ---------------------------------------------------------------------------

enum class TriadStructure { chain, fork, collider };

NLOHMANN_JSON_SERIALIZE_ENUM(TriadStructure, {{TriadStructure::chain, "chain"},
                                              {TriadStructure::fork, "fork"},
                                              {TriadStructure::collider, "collider"}})

inline TriadStructure parse_triad_structure(const std::string& s) {
    if (s == "chain") return TriadStructure::chain;
    if (s == "fork") return TriadStructure::fork;
    if (s == "collider") return TriadStructure::collider;
    throw std::invalid_argument("unknown triad structure '" + s + "' (expected chain, fork or collider)");
}

struct TriadSpec {
    TriadStructure structure = TriadStructure::chain;
    bool nonlinear = true;
    int length = 1000;
    double sigma_e = 0.31622776601683794;  // sqrt(0.1): noise variance 0.1
    int ar_order = 2;
    std::uint64_t seed = 0;

    void validate() const {
        if (length <= 10) throw std::invalid_argument("triad length must exceed 10");
        if (!(sigma_e >= 0.0) || !std::isfinite(sigma_e)) throw std::invalid_argument("sigma_e must be non-negative");
        if (ar_order != 2) throw std::invalid_argument("triad AR order is fixed to 2");
    }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TriadSpec, structure, nonlinear, length, sigma_e, ar_order, seed)

inline constexpr double kLinearTriadCoupling = 0.5;

/// Channel order is X, Y, Z. Returns parent lists indexed by child.
inline std::array<std::vector<int>, 3> triad_parents(TriadStructure structure) {
    constexpr int x = 0, y = 1, z = 2;
    switch (structure) {
        case TriadStructure::chain: return {{{z}, {x}, {}}};
        case TriadStructure::fork: return {{{z}, {z}, {}}};
        case TriadStructure::collider: return {{{}, {}, {x, y}}};
    }
    throw std::logic_error("unreachable");
}

inline double triad_influence(double u, bool nonlinear) {
    if (!nonlinear) return kLinearTriadCoupling * u;
    const double a = std::abs(u);
    return std::tanh(a) + std::sin(a);
}

inline std::pair<MultivariateSeries, AdjacencyMatrix> gen_triad(const TriadSpec& spec) {
    spec.validate();
    const auto parents = triad_parents(spec.structure);
    Rng rng(spec.seed);
    const int total = spec.length + kGeneratorBurnIn;
    Matrix x = Matrix::Zero(total, 3);
    for (int t = 2; t < total; ++t) {
        for (int i = 0; i < 3; ++i) {
            double v = 0.5 * x(t - 1, i) + 0.25 * x(t - 2, i);
            for (int j : parents[static_cast<std::size_t>(i)]) v += triad_influence(x(t - 1, j), spec.nonlinear);
            v += spec.sigma_e * standard_normal(rng);
            x(t, i) = v;
        }
    }
    MultivariateSeries series{x.bottomRows(spec.length), {"X", "Y", "Z"}, std::nullopt};
    AdjacencyMatrix adj{Matrix::Identity(3, 3)};
    for (int i = 0; i < 3; ++i)
        for (int j : parents[static_cast<std::size_t>(i)]) adj.entries(i, j) = 1.0;
    return {std::move(series), std::move(adj)};
}

// ---------------------------------------------------------------------------
// Sparse VAR(K)
// ---------------------------------------------------------------------------

struct VarSpec {
    int channels = 10;
    int lags = 2;
    int length = 1000;
    double sigma_e = 0.1;
    double sparsity = 0.2;  // fraction of off-diagonal entries in the support
    double coupling = 0.4;
    std::uint64_t seed = 0;

    void validate() const {
        if (channels < 2) throw std::invalid_argument("VAR needs at least 2 channels");
        if (lags < 1) throw std::invalid_argument("VAR lag order must be positive");
        if (length < 1) throw std::invalid_argument("VAR length must be positive");
        if (!(sigma_e >= 0.0)) throw std::invalid_argument("sigma_e must be non-negative");
        if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw std::invalid_argument("sparsity must lie in [0, 1]");
        if (!(coupling > 0.0) || !std::isfinite(coupling)) throw std::invalid_argument("coupling must be positive");
    }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(VarSpec, channels, lags, length, sigma_e, sparsity, coupling, seed)

struct VarSystem {
    MultivariateSeries series;
    AdjacencyMatrix adjacency;
    std::vector<Matrix> coefficients;  // A(1), ..., A(K)
};

inline constexpr double kVarStabilityRadius = 0.95;
inline constexpr double kVarRescaleFactor = 0.9;
inline constexpr int kVarMaxRescales = 200;

/// Spectral radius of the KP x KP companion matrix of X(t) = sum_k A(k) X(t-k).
inline double companion_spectral_radius(const std::vector<Matrix>& coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("no VAR coefficient matrices");
    const Eigen::Index p = coefficients.front().rows();
    const Eigen::Index k = static_cast<Eigen::Index>(coefficients.size());
    Matrix companion = Matrix::Zero(k * p, k * p);
    for (Eigen::Index l = 0; l < k; ++l) companion.block(0, l * p, p, p) = coefficients[static_cast<std::size_t>(l)];
    if (k > 1) companion.block(p, 0, (k - 1) * p, (k - 1) * p).setIdentity();
    Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Number of off-diagonal support entries drawn for a given sparsity.
inline int var_offdiagonal_count(int channels, double sparsity) {
    const double raw = sparsity * channels * (channels - 1);
    return static_cast<int>(std::ceil(raw - 1e-9));
}

/// Simulates the recursion from `initial` (row 0 of the output) with no
/// burn-in; lags before t = 0 are taken as zero.
inline Matrix simulate_var(const std::vector<Matrix>& coefficients, int steps, double sigma_e, const Vector& initial,
                           Rng& rng) {
    const Eigen::Index p = initial.size();
    Matrix x = Matrix::Zero(steps, p);
    if (steps == 0) return x;
    x.row(0) = initial.transpose();
    Vector noise(p);
    for (int t = 1; t < steps; ++t) {
        Vector next = Vector::Zero(p);
        for (std::size_t k = 1; k <= coefficients.size(); ++k) {
            if (t - static_cast<int>(k) < 0) break;
            next.noalias() += coefficients[k - 1] * x.row(t - static_cast<int>(k)).transpose();
        }
        for (Eigen::Index c = 0; c < p; ++c) noise[c] = sigma_e * standard_normal(rng);
        x.row(t) = (next + noise).transpose();
    }
    return x;
}

inline VarSystem gen_var(const VarSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const int p = spec.channels;

    std::vector<std::pair<int, int>> offdiag;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) offdiag.emplace_back(i, j);
    shuffle(offdiag, rng);
    offdiag.resize(static_cast<std::size_t>(var_offdiagonal_count(p, spec.sparsity)));

    Matrix support = Matrix::Identity(p, p);
    for (auto [i, j] : offdiag) support(i, j) = 1.0;

    std::vector<Matrix> coefficients;
    for (int k = 0; k < spec.lags; ++k) {
        Matrix a = Matrix::Zero(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                if (support(i, j) != 0.0) a(i, j) = (rng() & 1U) ? spec.coupling : -spec.coupling;
        coefficients.push_back(std::move(a));
    }

    int rescales = 0;
    while (companion_spectral_radius(coefficients) >= kVarStabilityRadius) {
        if (++rescales > kVarMaxRescales) throw std::runtime_error("cannot stabilize VAR system");
        for (auto& a : coefficients) a *= kVarRescaleFactor;
    }

    const Matrix sim = simulate_var(coefficients, spec.length + kGeneratorBurnIn, spec.sigma_e, Vector::Zero(p), rng);
    VarSystem out;
    out.series = {sim.bottomRows(spec.length), default_channel_names(p), std::nullopt};
    out.adjacency.entries = Matrix::Zero(p, p);
    for (const auto& a : coefficients) out.adjacency.entries = out.adjacency.entries.cwiseMax((a.array() != 0.0).cast<double>().matrix());
    out.coefficients = std::move(coefficients);
    return out;
}

// ---------------------------------------------------------------------------
// Lorenz-96
// ---------------------------------------------------------------------------

struct LorenzSpec {
    int channels = 20;
    double forcing = 20.0;
    int length = 1000;
    double dt_integrate = 0.01;
    int sample_every = 5;
    int burn_in = 1000;
    double perturbation_std = 0.01;
    std::uint64_t seed = 0;

    void validate() const {
        if (channels < 4) throw std::invalid_argument("Lorenz-96 needs at least 4 channels");
        if (!(dt_integrate > 0.0)) throw std::invalid_argument("dt_integrate must be positive");
        if (sample_every < 1) throw std::invalid_argument("sample_every must be positive");
        if (burn_in < 0) throw std::invalid_argument("burn_in must be non-negative");
        if (length < 1) throw std::invalid_argument("Lorenz-96 length must be positive");
        if (!(perturbation_std >= 0.0)) throw std::invalid_argument("perturbation_std must be non-negative");
    }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LorenzSpec, channels, forcing, length, dt_integrate, sample_every, burn_in,
                                   perturbation_std, seed)

/// dx_i/dt = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F, indices mod p.
inline void lorenz96_derivative(const Vector& x, double forcing, Vector& dx) {
    const Eigen::Index p = x.size();
    dx.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const double xp1 = x[(i + 1) % p];
        const double xm1 = x[(i + p - 1) % p];
        const double xm2 = x[(i + p - 2) % p];
        dx[i] = (xp1 - xm2) * xm1 - x[i] + forcing;
    }
}

inline void rk4_step(Vector& x, double forcing, double dt) {
    Vector k1, k2, k3, k4;
    lorenz96_derivative(x, forcing, k1);
    lorenz96_derivative(x + 0.5 * dt * k1, forcing, k2);
    lorenz96_derivative(x + 0.5 * dt * k2, forcing, k3);
    lorenz96_derivative(x + dt * k3, forcing, k4);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline constexpr double kLorenzBlowUp = 1e6;

/// Integrates `steps` RK4 steps from `x` in place.
inline void integrate_lorenz96(Vector& x, double forcing, double dt, long steps) {
    for (long s = 0; s < steps; ++s) {
        rk4_step(x, forcing, dt);
        if (!(x.cwiseAbs().maxCoeff() <= kLorenzBlowUp))
            throw std::runtime_error("Lorenz-96 integration blew up; try a smaller dt_integrate");
    }
}

inline AdjacencyMatrix lorenz96_adjacency(int channels) {
    AdjacencyMatrix adj{Matrix::Zero(channels, channels)};
    for (int i = 0; i < channels; ++i)
        for (int offset : {-2, -1, 0, 1}) adj.entries(i, (i + offset + channels) % channels) = 1.0;
    return adj;
}

inline std::pair<MultivariateSeries, AdjacencyMatrix> gen_lorenz96(const LorenzSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Vector x(spec.channels);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = spec.forcing + spec.perturbation_std * standard_normal(rng);

    integrate_lorenz96(x, spec.forcing, spec.dt_integrate, spec.burn_in);
    Matrix values(spec.length, spec.channels);
    for (int t = 0; t < spec.length; ++t) {
        integrate_lorenz96(x, spec.forcing, spec.dt_integrate, spec.sample_every);
        values.row(t) = x.transpose();
    }
    MultivariateSeries series{std::move(values), default_channel_names(spec.channels),
                              spec.dt_integrate * spec.sample_every};
    return {std::move(series), lorenz96_adjacency(spec.channels)};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

struct LoadedDataset {
    MultivariateSeries series;
    std::optional<AdjacencyMatrix> adjacency;
};

inline LoadedDataset load_csv_dataset(const std::filesystem::path& path,
                                      const std::optional<std::filesystem::path>& adjacency_path = std::nullopt) {
    LoadedDataset out{read_series_csv(path), std::nullopt};
    out.series.validate();
    if (adjacency_path) {
        auto adj = read_adjacency_csv(*adjacency_path);
        if (adj.size() != out.series.channels())
            throw ParseError(adjacency_path->string() + ": adjacency is " + std::to_string(adj.size()) + "x" +
                             std::to_string(adj.size()) + " but the series has " +
                             std::to_string(out.series.channels()) + " channels");
        out.adjacency = std::move(adj);
    }
    return out;
}

struct DatasetFiles {
    std::filesystem::path series;
    std::filesystem::path adjacency;
    std::filesystem::path metadata;
};

/// Writes <stem>.csv, <stem>_adjacency.csv and <stem>_meta.json into `dir`.
inline DatasetFiles write_dataset(const std::filesystem::path& dir, const std::string& stem,
                                  const MultivariateSeries& series, const AdjacencyMatrix& adjacency,
                                  const nlohmann::json& metadata) {
    DatasetFiles files{dir / (stem + ".csv"), dir / (stem + "_adjacency.csv"), dir / (stem + "_meta.json")};
    write_series_csv(files.series, series);
    write_matrix_csv(files.adjacency, adjacency.entries);
    write_text_file(files.metadata, metadata.dump(2) + "\n");
    return files;
}

}  // namespace mcgc
