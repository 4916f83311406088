#include "mcgc/generators.hpp"

#include <gtest/gtest.h>

using namespace mcgc;

TEST(Triad, ChainGroundTruth) {
    const auto [s, adj] = gen_triad({TriadStructure::chain, true, 100, 0.1, 2, 1});
    Matrix expected = Matrix::Identity(3, 3);
    expected(0, 2) = 1.0;  // Z -> X
    expected(1, 0) = 1.0;  // X -> Y
    EXPECT_EQ(adj.entries, expected);
    EXPECT_EQ(s.channel_names, (std::vector<std::string>{"X", "Y", "Z"}));
}

TEST(Triad, ForkAndColliderGroundTruth) {
    const auto fork = gen_triad({TriadStructure::fork, true, 100, 0.1, 2, 1}).second;
    EXPECT_EQ(fork.entries(0, 2), 1.0);
    EXPECT_EQ(fork.entries(1, 2), 1.0);
    const auto col = gen_triad({TriadStructure::collider, true, 100, 0.1, 2, 1}).second;
    EXPECT_EQ(col.entries(2, 0), 1.0);
    EXPECT_EQ(col.entries(2, 1), 1.0);
}

TEST(Triad, AdjacencyShapeInvariant) {
    for (auto st : {TriadStructure::chain, TriadStructure::fork, TriadStructure::collider}) {
        for (bool nl : {true, false}) {
            const auto adj = gen_triad({st, nl, 50, 0.2, 2, 3}).second;
            EXPECT_EQ(adj.entries.diagonal(), Vector::Ones(3));
            EXPECT_EQ(adj.entries.sum() - 3.0, 2.0);
        }
    }
}

TEST(Triad, ZeroNoiseStaysAtZero) {
    for (bool nl : {true, false}) {
        const auto s = gen_triad({TriadStructure::collider, nl, 100, 0.0, 2, 5}).first;
        EXPECT_TRUE(s.values.isZero(0.0));
    }
}

TEST(Triad, DeterministicGivenSeed) {
    const TriadSpec spec{TriadStructure::chain, true, 1000, 0.1, 2, 42};
    const auto a = gen_triad(spec).first;
    const auto b = gen_triad(spec).first;
    EXPECT_EQ(a.values, b.values);
    auto other = spec;
    other.seed = 43;
    EXPECT_NE(gen_triad(other).first.values, a.values);
}

TEST(Triad, NonlinearInfluence) {
    EXPECT_DOUBLE_EQ(triad_influence(-1.3, true), std::tanh(1.3) + std::sin(1.3));
    EXPECT_DOUBLE_EQ(triad_influence(-1.3, false), -0.65);
}

TEST(Triad, Validation) {
    EXPECT_THROW(gen_triad({TriadStructure::chain, true, 10, 0.1, 2, 0}), std::invalid_argument);
    EXPECT_THROW(gen_triad({TriadStructure::chain, true, 100, 0.1, 3, 0}), std::invalid_argument);
    EXPECT_THROW(parse_triad_structure("star"), std::invalid_argument);
}

TEST(Var, ScalarRecursion) {
    Rng rng(0);
    const std::vector<Matrix> a{0.5 * Matrix::Identity(3, 3)};
    const Matrix x = simulate_var(a, 12, 0.0, Vector::Ones(3), rng);
    for (int t = 0; t < 12; ++t)
        for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(x(t, c), std::pow(0.5, t));
}

TEST(Var, CompanionRadius) {
    EXPECT_NEAR(companion_spectral_radius({0.5 * Matrix::Identity(4, 4)}), 0.5, 1e-12);
    // x_t = 0.5 x_{t-1} + 0.24 x_{t-2}: roots of z^2 - 0.5 z - 0.24 are 0.8 and -0.3.
    EXPECT_NEAR(companion_spectral_radius({Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.24)}), 0.8, 1e-12);
}

TEST(Var, SupportCount) {
    const VarSpec spec{10, 2, 1000, 0.1, 0.2, 0.4, 17};
    const auto sys = gen_var(spec);
    const Matrix& adj = sys.adjacency.entries;
    EXPECT_EQ(adj.diagonal(), Vector::Ones(10));
    EXPECT_EQ(adj.sum() - adj.trace(), 18.0);  // ceil(0.2 * 10 * 9)
    EXPECT_EQ(var_offdiagonal_count(10, 0.25), 23);
    EXPECT_EQ(var_offdiagonal_count(10, 0.0), 0);
    EXPECT_EQ(var_offdiagonal_count(10, 1.0), 90);
}

TEST(Var, StableAndDeterministic) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const VarSpec spec{10, 2, 1000, 0.1, 0.3, 0.4, seed};
        const auto a = gen_var(spec);
        EXPECT_LT(companion_spectral_radius(a.coefficients), kVarStabilityRadius);
        EXPECT_EQ(a.series.values, gen_var(spec).series.values);
        EXPECT_EQ(a.coefficients.size(), 2u);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const bool any = a.coefficients[0](i, j) != 0.0 || a.coefficients[1](i, j) != 0.0;
                EXPECT_EQ(any, a.adjacency.entries(i, j) == 1.0);
            }
    }
}

TEST(Var, StationaryInPractice) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = gen_var({10, 2, 1000, 0.1, 0.5, 0.4, seed}).series;
        const Matrix first = s.values.topRows(500);
        const Matrix second = s.values.bottomRows(500);
        auto var = [](const Matrix& m) {
            const Matrix c = m.rowwise() - m.colwise().mean();
            return Vector((c.colwise().squaredNorm() / (m.rows() - 1.0)).transpose());
        };
        const Vector v1 = var(first), v2 = var(second);
        for (int c = 0; c < 10; ++c) {
            EXPECT_LT(v2[c], 3.0 * v1[c]);
            EXPECT_GT(v2[c], v1[c] / 3.0);
        }
    }
}

TEST(Lorenz, EquilibriumIsFixed) {
    Vector x = Vector::Constant(10, 20.0);
    Vector dx;
    lorenz96_derivative(x, 20.0, dx);
    EXPECT_TRUE(dx.isZero(0.0));
    integrate_lorenz96(x, 20.0, 0.01, 1000);
    EXPECT_LT((x.array() - 20.0).abs().maxCoeff(), 1e-9);
}

TEST(Lorenz, GroundTruthHasFourParents) {
    const auto adj = lorenz96_adjacency(20);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(adj.entries.row(i).sum(), 4.0);
        EXPECT_EQ(adj.entries(i, i), 1.0);
        EXPECT_EQ(adj.entries(i, (i + 1) % 20), 1.0);
        EXPECT_EQ(adj.entries(i, (i + 19) % 20), 1.0);
        EXPECT_EQ(adj.entries(i, (i + 18) % 20), 1.0);
    }
    EXPECT_THROW(gen_lorenz96({3, 20.0, 10, 0.01, 5, 0, 0.01, 0}), std::invalid_argument);
}

TEST(Lorenz, Rk4ConvergesAtFourthOrder) {
    // Richardson comparison over one time unit: successive halvings of the
    // step should shrink the difference by about 2^4.
    Rng rng(3);
    Vector x0(8);
    for (int i = 0; i < 8; ++i) x0[i] = 8.0 + standard_normal(rng);
    auto run = [&](double dt) {
        Vector x = x0;
        integrate_lorenz96(x, 8.0, dt, std::lround(1.0 / dt));
        return x;
    };
    const Vector a = run(0.02), b = run(0.01), c = run(0.005);
    const double ratio = (a - b).norm() / (b - c).norm();
    EXPECT_GT(ratio, 12.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(Lorenz, BoundedOverFullHorizon) {
    const auto [s, adj] = gen_lorenz96({20, 20.0, 1000, 0.01, 5, 1000, 0.01, 4});
    EXPECT_TRUE(s.values.allFinite());
    EXPECT_LT(s.values.cwiseAbs().maxCoeff(), 100.0);
    EXPECT_GT(s.values.col(0).maxCoeff() - s.values.col(0).minCoeff(), 1.0);  // not stuck at equilibrium
    ASSERT_TRUE(s.dt.has_value());
    EXPECT_DOUBLE_EQ(*s.dt, 0.05);
}

TEST(Lorenz, BlowUpIsReported) {
    EXPECT_THROW(gen_lorenz96({10, 20.0, 100, 0.5, 1, 0, 0.01, 0}), std::runtime_error);
}

TEST(Lorenz, Deterministic) {
    const LorenzSpec spec{10, 20.0, 200, 0.01, 5, 100, 0.01, 8};
    EXPECT_EQ(gen_lorenz96(spec).first.values, gen_lorenz96(spec).first.values);
}
