#include "evp/cohomology.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace evp;
using evp::testing::code_of;
using evp::testing::kGolden;
using evp::testing::random_poly;
using evp::testing::sup_on_grid;

TEST(SolveRotation, SingleModeClosedForm) {
    const auto psi = PeriodicFunction::cosine(1);
    const auto rep = solve_rotation(psi, kGolden);
    EXPECT_LT(rep.residual_sup, 1e-12);
    const double denom = 2.0 - 2.0 * std::cos(kTwoPi * kGolden);
    for (double x : {0.0, 0.13, 0.5, 0.71}) {
        const double expected = (std::cos(kTwoPi * (x - kGolden)) - std::cos(kTwoPi * x)) / denom;
        EXPECT_NEAR(rep.solution(x), expected, 1e-13);
    }
    const Complex e = unit_phase(kGolden) - 1.0;
    EXPECT_LT(std::abs(rep.solution.coefficient(1) - 0.5 / e), 1e-15);
    EXPECT_EQ(rep.solution.coefficient(0), Complex(0.0));
}

TEST(SolveRotation, ZeroGivesZero) {
    const auto rep = solve_rotation(PeriodicFunction(), kGolden);
    EXPECT_EQ(rep.residual_sup, 0.0);
    EXPECT_EQ(rep.solution.cr_norm_upper(0), 0.0);
}

TEST(SolveRotation, MeanObstruction) {
    EXPECT_EQ(code_of([] { solve_rotation(1.0 + PeriodicFunction::cosine(1), kGolden); }),
              ErrorCode::MeanObstruction);
}

TEST(SolveRotation, ResonanceRefused) {
    // k alpha is an integer for k = 4.
    EXPECT_EQ(code_of([] { solve_rotation(PeriodicFunction::cosine(4), 0.25); }), ErrorCode::Resonance);
}

TEST(SolveRotation, RandomBandLimitedResiduals) {
    std::mt19937_64 rng(21);
    const auto rot = continued_fraction(parse_alpha("golden"), 30);
    for (int trial = 0; trial < 20; ++trial) {
        const auto psi = random_poly(rng, 64, 1.0, true);
        const auto rep = solve_rotation(psi, rot);
        EXPECT_LT(rep.residual_sup, 1e-9);
        const auto& phi = rep.solution;
        EXPECT_LT(sup_on_grid([&](double x) { return phi(x + kGolden) - phi(x) - psi(x); }, 1024), 1e-9);
    }
}

TEST(SolveRotation, Linearity) {
    std::mt19937_64 rng(22);
    const auto a = random_poly(rng, 10, 1.0, true);
    const auto b = random_poly(rng, 10, 1.0, true);
    const auto sa = solve_rotation(a, kGolden).solution;
    const auto sb = solve_rotation(b, kGolden).solution;
    const auto sab = solve_rotation(2.0 * a + (-3.0) * b, kGolden).solution;
    for (int k = -10; k <= 10; ++k) {
        EXPECT_LT(std::abs(sab.coefficient(k) - (2.0 * sa.coefficient(k) - 3.0 * sb.coefficient(k))), 1e-13);
    }
}

TEST(SolveRotation, LossOfDerivativesAtLiouvilleScale) {
    const auto sched = liouville_alpha({2.0, 3.0}, 2);
    const auto& st = sched.stages[1];
    const long q = static_cast<long>(st.q);
    const auto psi = PeriodicFunction::cosine(static_cast<int>(q));
    CohomologyOptions opts;
    opts.r = 0;
    opts.m0 = 2;
    const auto rep = solve_rotation(psi, sched.alpha, opts);
    BigRational dist = st.q * sched.alpha.alpha.midpoint() - st.p;
    if (dist < 0) dist = -dist;
    const double d = static_cast<double>(dist);
    EXPECT_EQ(rep.denominator_index, q);
    EXPECT_LE(rep.smallest_denominator, kTwoPi * d * (1 + 1e-9));
    EXPECT_NEAR(rep.norm_ratio * std::pow(kTwoPi * q, 2) * rep.smallest_denominator, 1.0, 1e-9);

    const auto golden = solve_rotation(psi, kGolden, opts);
    EXPECT_GT(rep.norm_ratio, 1e3 * golden.norm_ratio);
}

TEST(SolveDamped, ConstantBalance) {
    const auto rep = solve_damped(PeriodicFunction::constant(1.0), kGolden, 2.0);
    EXPECT_NEAR(rep.solution.mean(), 1.0, 1e-15);
    EXPECT_LT(rep.residual_sup, 1e-15);
}

TEST(SolveDamped, SpectralAgreesWithSeries) {
    const auto rep = solve_damped(PeriodicFunction::cosine(1), kGolden, 2.0);
    EXPECT_LT(rep.series_discrepancy, 1e-10);
    EXPECT_EQ(rep.solution.coefficient(0), Complex(0.0));

    // Independent series lambda kappa(x) - kappa(x - a) = F with kappa = sum lambda^{-j} F(x - j a).
    for (double x : {0.0, 0.2, 0.9}) {
        double s = 0.0;
        for (int j = 0; j < 60; ++j) s += std::pow(2.0, -(j + 1)) * std::cos(kTwoPi * (x - j * kGolden));
        EXPECT_NEAR(rep.solution(x), s, 1e-12);
    }
}

TEST(SolveDamped, NotDampedRefused) {
    EXPECT_EQ(code_of([] { solve_damped(PeriodicFunction::cosine(1), kGolden, 1.0); }), ErrorCode::NotDamped);
    EXPECT_EQ(code_of([] { solve_damped(PeriodicFunction::cosine(1), kGolden, 0.5); }), ErrorCode::NotDamped);
}

TEST(SolveEta, ConstantBalance) {
    const auto rep = solve_eta(PeriodicFunction::constant(1.0), kGolden, 2.0);
    EXPECT_NEAR(rep.solution.mean(), -2.0, 1e-14);
}

TEST(SolveEta, SpectralAgreesWithSeries) {
    const auto g = 2.0 + PeriodicFunction::cosine(1);
    const auto rep = solve_eta(g, kGolden, 2.0);
    EXPECT_LT(rep.series_discrepancy, 1e-10);
    EXPECT_GE(rep.smallest_denominator, 0.5 - 1e-15);
    for (double x : {0.05, 0.5}) {
        double s = 0.0;
        for (int j = 0; j < 60; ++j) s -= std::pow(2.0, -j) / (2.0 + std::cos(kTwoPi * (x + j * kGolden)));
        EXPECT_NEAR(rep.solution(x), s, 1e-10);
    }
}

TEST(SolveEta, DualConstructionsAgreeForModerateDamping) {
    std::mt19937_64 rng(23);
    for (double lambda : {1.1, 1.5, 3.0}) {
        const auto g = 3.0 + random_poly(rng, 5, 0.1);
        EXPECT_LT(reciprocal(g).tail, 1e-12);
        EXPECT_LT(solve_eta(g, kGolden, lambda).series_discrepancy, 1e-9) << lambda;
        EXPECT_LT(solve_damped(random_poly(rng, 5), kGolden, lambda).series_discrepancy, 1e-9) << lambda;
    }
}
