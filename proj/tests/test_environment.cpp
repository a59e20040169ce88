#include "evp/environment.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace evp;
using evp::testing::code_of;
using evp::testing::kGolden;
using evp::testing::random_poly;

namespace {

// rho(x) - [p(x-a) rho(x-a) + q(x+a) rho(x+a)] at points, evaluated pointwise.
double pointwise_stationarity(const Environment& env, const PeriodicFunction& rho, int G = 1 << 12) {
    double worst = 0.0;
    const double a = env.alpha;
    for (int j = 0; j < G; ++j) {
        const double x = static_cast<double>(j) / G;
        const double in = env.p(x - a) * rho(x - a) + (1.0 - env.p(x + a)) * rho(x + a);
        worst = std::max(worst, std::abs(in - rho(x)));
    }
    return worst;
}

}  // namespace

TEST(Classify, ConstantHalfIsSymmetric) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    EXPECT_EQ(env.symmetry, Symmetry::Symmetric);
    EXPECT_NEAR(env.lambda, 1.0, 1e-15);
    EXPECT_NEAR(env.epsilon_margin, 0.5, 1e-15);
}

TEST(Classify, LogisticCosineIsSymmetric) {
    const auto env = classify_log_odds(kGolden, PeriodicFunction::cosine(1));
    EXPECT_EQ(env.symmetry, Symmetry::Symmetric);
    EXPECT_EQ(env.lambda, 1.0);
    // Same answer from p alone, through the grid logarithm.
    const auto env2 = classify(kGolden, env.p);
    EXPECT_EQ(env2.symmetry, Symmetry::Symmetric);
    EXPECT_LT(std::abs(env2.log_lambda), 1e-10);
}

TEST(Classify, ConstantTwoThirdsHasLambdaTwo) {
    const auto env = classify(kGolden, PeriodicFunction::constant(2.0 / 3.0));
    EXPECT_EQ(env.symmetry, Symmetry::Asymmetric);
    EXPECT_NEAR(env.lambda, 2.0, 1e-14);
}

TEST(Classify, DegenerateRejected) {
    EXPECT_EQ(code_of([] { classify(kGolden, 0.5 + PeriodicFunction::cosine(1, 0.5)); }),
              ErrorCode::DegenerateEnvironment);
    EXPECT_EQ(code_of([] { classify(kGolden, PeriodicFunction::constant(1.0)); }), ErrorCode::DegenerateEnvironment);
}

TEST(ApplyT, ConstantsAndModes) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto one = apply_T(env, PeriodicFunction::constant(1.0));
    EXPECT_NEAR(one.mean(), 1.0, 1e-15);
    EXPECT_EQ(one.cr_norm_upper(0), one.mean());
    for (int k : {1, 3, 7}) {
        const auto f = PeriodicFunction::cosine(k);
        const auto tf = apply_T(env, f);
        EXPECT_NEAR(tf.coefficient(k).real(), 0.5 * std::cos(kTwoPi * k * kGolden), 1e-15);
    }
}

TEST(ApplyT, PositivityAndMarkovOnRandomEnvironment) {
    std::mt19937_64 rng(31);
    const auto env = classify_log_odds(kGolden, random_poly(rng, 4, 0.2));
    const auto f = 2.0 + PeriodicFunction::cosine(2);
    const auto tf = apply_T(env, f);
    EXPECT_GE(tf.grid_min(), 0.0);
    const auto c = apply_T(env, PeriodicFunction::constant(3.0));
    EXPECT_LT(std::abs(c.mean() - 3.0), 1e-15);
    for (int k = 1; k <= c.degree(); ++k) EXPECT_LT(std::abs(c.coefficient(k)), 1e-15);
    for (double x : {0.1, 0.6}) EXPECT_NEAR(tf(x), env.p(x) * f(x + kGolden) + env.q(x) * f(x - kGolden), 1e-13);
}

TEST(Density, ConstantHalfIsUniform) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto d = invariant_density(env);
    EXPECT_NEAR(d.rho.mean(), 1.0, 1e-15);
    EXPECT_LT(d.rho.cr_norm_upper(0) - 1.0, 1e-14);
    EXPECT_LT(d.stationarity_residual, 1e-14);
}

TEST(Density, ConstantTwoThirdsHandBalance) {
    const auto env = classify(kGolden, PeriodicFunction::constant(2.0 / 3.0));
    const auto d = invariant_density(env);
    EXPECT_EQ(d.construction, DensityConstruction::AsymmetricEtaGOverP);
    ASSERT_TRUE(d.eta.has_value());
    EXPECT_NEAR(d.eta->mean(), -2.0, 1e-13);
    EXPECT_NEAR(d.g.mean(), 1.0, 1e-14);
    EXPECT_NEAR(d.rho.mean(), 1.0, 1e-14);
    EXPECT_LT(d.rho.cr_norm_upper(0) - 1.0, 1e-13);
    EXPECT_LT(d.stationarity_residual, 1e-14);
}

TEST(Density, SymmetricLogisticResidualAndDefect) {
    const auto env = classify_log_odds(kGolden, PeriodicFunction::cosine(1));
    const auto d = invariant_density(env);
    EXPECT_EQ(d.construction, DensityConstruction::SymmetricGOverQ);
    EXPECT_LT(d.stationarity_residual, 1e-9);
    EXPECT_LT(pointwise_stationarity(env, d.rho), 1e-9);
    EXPECT_LT(d.symmetric_defect, 1e-9);
    EXPECT_GT(d.rho.grid_min(), 0.0);
    EXPECT_NEAR(d.rho.mean(), 1.0, 1e-14);
}

TEST(Density, AsymmetricLogisticResidual) {
    const auto env = classify_log_odds(kGolden, 0.5 + PeriodicFunction::cosine(1));
    EXPECT_NEAR(env.lambda, std::exp(0.5), 1e-15);
    const auto d = invariant_density(env);
    EXPECT_EQ(d.construction, DensityConstruction::AsymmetricEtaGOverP);
    EXPECT_LT(d.stationarity_residual, 1e-9);
    EXPECT_LT(pointwise_stationarity(env, d.rho), 1e-9);
    EXPECT_GT(d.rho.grid_min(), 0.0);
}

TEST(Density, WeakStationarity) {
    const auto env = classify_log_odds(kGolden, 0.5 + PeriodicFunction::cosine(1));
    const auto d = invariant_density(env);
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        const auto f = random_poly(rng, 6);
        EXPECT_NEAR(pairing(d.rho, apply_T(env, f)), pairing(d.rho, f), 1e-9);
    }
}

TEST(Density, MirrorConsistencyBelowOne) {
    const auto env = classify_log_odds(kGolden, -0.5 + PeriodicFunction::cosine(1) + PeriodicFunction::sine(2, 0.3));
    ASSERT_LT(env.lambda, 1.0);
    const auto d = invariant_density(env);
    EXPECT_TRUE(d.mirrored);
    EXPECT_LT(d.stationarity_residual, 1e-9);
    const auto m = mirror(env);
    EXPECT_NEAR(m.lambda, 1.0 / env.lambda, 1e-14);
    const auto dm = invariant_density(m);
    EXPECT_FALSE(dm.mirrored);
    const auto back = dm.rho.reflected();
    EXPECT_LT(evp::testing::sup_on_grid([&](double x) { return back(x) - d.rho(x); }), 1e-10);
}

TEST(Density, LowerThanOneConstant) {
    const auto env = classify(kGolden, PeriodicFunction::constant(1.0 / 3.0));
    EXPECT_NEAR(env.lambda, 0.5, 1e-14);
    const auto d = invariant_density(env);
    EXPECT_LT(d.rho.cr_norm_upper(0) - 1.0, 1e-13);
    EXPECT_LT(d.stationarity_residual, 1e-14);
}
