#include "mcgc/mlp.hpp"

#include <gtest/gtest.h>

using namespace mcgc;

namespace {

Matrix random_inputs(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = standard_normal(rng);
    return m;
}

}  // namespace

TEST(Mlp, CreateShapes) {
    const auto m = MlpRegressor::create(5, 3, {64, 64}, Activation::relu, 0.1, 1);
    EXPECT_EQ(m.layer_sizes, (std::vector<int>{15, 64, 64, 3}));
    EXPECT_EQ(m.parameter_count(), 15 * 64 + 64 + 64 * 64 + 64 + 64 * 3 + 3);
    EXPECT_EQ(m.hidden_layer_count(), 2);
    Vector p = m.parameters();
    auto copy = m;
    copy.set_parameters(p);
    EXPECT_EQ(copy.parameters(), p);
}

TEST(Mlp, IdentityMaskEqualsPlainForward) {
    const auto m = MlpRegressor::create(2, 4, {16}, Activation::tanh, 0.2, 2);
    const Matrix x = random_inputs(10, 8, 3);
    EXPECT_EQ(forward(m, x, InputMask::all(4), std::nullopt), forward(m, x));
}

TEST(Mlp, SameDropoutStateIsDeterministic) {
    const auto m = MlpRegressor::create(2, 4, {16, 16}, Activation::relu, 0.3, 2);
    const Matrix x = random_inputs(10, 8, 3);
    const auto a = forward(m, x, InputMask::all(4), DropoutState{99});
    const auto b = forward(m, x, InputMask::all(4), DropoutState{99});
    EXPECT_EQ(a, b);
    EXPECT_NE(a, forward(m, x, InputMask::all(4), DropoutState{100}));
    EXPECT_NE(a, forward(m, x));
}

TEST(Mlp, ZeroRateDropoutIsDeterministicForward) {
    const auto m = MlpRegressor::create(2, 4, {16, 16}, Activation::relu, 0.0, 2);
    const Matrix x = random_inputs(10, 8, 3);
    EXPECT_EQ(forward(m, x, InputMask::all(4), DropoutState{5}), forward(m, x));
}

TEST(Mlp, DropoutPatternIndependentOfBatchComposition) {
    // Row r of a batch sees the same pattern whether or not other rows are present.
    const auto m = MlpRegressor::create(2, 3, {32}, Activation::relu, 0.4, 2);
    const Matrix x = random_inputs(6, 6, 4);
    const Matrix full = forward(m, x, InputMask::all(3), DropoutState{7});
    const Matrix head = forward(m, x.topRows(3), InputMask::all(3), DropoutState{7});
    EXPECT_EQ(full.topRows(3), head);
}

TEST(Mlp, MaskZeroEquivalence) {
    const auto m = MlpRegressor::create(3, 4, {16}, Activation::relu, 0.2, 5);
    const Matrix x = random_inputs(12, 12, 6);
    for (int c = 0; c < 4; ++c) {
        Matrix zeroed = x;
        for (int lag = 0; lag < 3; ++lag) zeroed.col(lag * 4 + c).setZero();
        EXPECT_EQ(forward(m, x, InputMask::without(4, c), DropoutState{1}),
                  forward(m, zeroed, InputMask::all(4), DropoutState{1}));
    }
}

TEST(Mlp, ShapeMismatchAndBadMask) {
    const auto m = MlpRegressor::create(2, 3, {8}, Activation::relu, 0.1, 1);
    EXPECT_THROW(forward(m, Matrix::Zero(4, 5)), std::invalid_argument);
    EXPECT_THROW(forward(m, Matrix::Zero(4, 6), InputMask::all(2)), std::invalid_argument);
    InputMask none{{0, 0, 0}};
    EXPECT_THROW(forward(m, Matrix::Zero(4, 6), none), std::invalid_argument);
}

TEST(InputMaskSampling, TwoChannelsDropExactlyOne) {
    Rng rng(1);
    int dropped_first = 0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const auto m = sample_input_mask(2, rng);
        ASSERT_EQ(m.dropped_count(), 1);
        dropped_first += m.kept[0] == 0;
    }
    EXPECT_NEAR(dropped_first / static_cast<double>(n), 0.5, 0.015);
}

TEST(InputMaskSampling, DropCountUniform) {
    Rng rng(2);
    std::vector<int> hist(5, 0);
    std::vector<int> per_channel(5, 0);
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const auto m = sample_input_mask(5, rng);
        ASSERT_GE(m.dropped_count(), 1);
        ASSERT_LE(m.dropped_count(), 4);
        ++hist[static_cast<std::size_t>(m.dropped_count())];
        for (int c = 0; c < 5; ++c) per_channel[static_cast<std::size_t>(c)] += m.kept[static_cast<std::size_t>(c)] == 0;
    }
    for (int d = 1; d <= 4; ++d) EXPECT_NEAR(hist[static_cast<std::size_t>(d)] / static_cast<double>(n), 0.25, 0.25 * 0.02);
    // E[d] / P = 2.5 / 5: every channel is dropped half the time by symmetry.
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(per_channel[static_cast<std::size_t>(c)] / static_cast<double>(n), 0.5, 0.01);
}

TEST(InputMaskSampling, SingleChannelIsError) {
    Rng rng(0);
    EXPECT_THROW(sample_input_mask(1, rng), std::invalid_argument);
}

TEST(Mlp, InvertedDropoutPreservesExpectation) {
    // Single hidden layer with a linear output: the output is linear in the
    // dropout mask, so its mean over draws is the alpha = 0 prediction.
    const auto m = MlpRegressor::create(2, 3, {32}, Activation::tanh, 0.3, 11);
    const Matrix x = random_inputs(1, 6, 12);
    const Matrix reference = forward(m, x);
    const int draws = 10000;
    Vector sum = Vector::Zero(3), sumsq = Vector::Zero(3);
    for (int d = 0; d < draws; ++d) {
        const Vector y = forward(m, x, InputMask::all(3), DropoutState{static_cast<std::uint64_t>(d)}).row(0).transpose();
        sum += y;
        sumsq += y.cwiseProduct(y);
    }
    const Vector mean = sum / draws;
    const Vector var = (sumsq / draws - mean.cwiseProduct(mean)) * draws / (draws - 1.0);
    for (int c = 0; c < 3; ++c) {
        const double se = std::sqrt(var[c] / draws);
        EXPECT_LT(std::abs(mean[c] - reference(0, c)), 3.0 * se) << "channel " << c;
    }
}

TEST(Mlp, DropoutKeepRateMatches) {
    DropoutState st{123};
    int kept = 0;
    const int n = 200000;
    for (int r = 0; r < n / 100; ++r) {
        const auto key = st.row_key(0, r);
        for (int u = 0; u < 100; ++u) kept += DropoutState::keep(key, u, 0.25);
    }
    EXPECT_NEAR(kept / static_cast<double>(n), 0.75, 0.005);
}

TEST(ModelJson, RoundTripIsExact) {
    const auto m = MlpRegressor::create(3, 4, {10, 7}, Activation::tanh, 0.15, 21);
    const auto text = model_to_json(m).dump();
    const auto back = model_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.layer_sizes, m.layer_sizes);
    EXPECT_EQ(back.parameters(), m.parameters());
    EXPECT_EQ(back.activation, m.activation);
    EXPECT_EQ(back.dropout_rate, m.dropout_rate);
    EXPECT_EQ(back.lags, 3);
}

TEST(ModelJson, RejectsInconsistentShapes) {
    const auto m = MlpRegressor::create(2, 2, {4}, Activation::relu, 0.1, 1);
    auto j = model_to_json(m);
    j["layers"][0]["weights"].erase(0);
    EXPECT_THROW(model_from_json(j), std::invalid_argument);
    j = model_to_json(m);
    j["layer_sizes"][1] = 5;
    EXPECT_THROW(model_from_json(j), std::invalid_argument);
    j = model_to_json(m);
    j["format"] = "other";
    EXPECT_THROW(model_from_json(j), std::invalid_argument);
}
