#include "evp/poisson.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace evp;
using evp::testing::code_of;
using evp::testing::kGolden;
using evp::testing::random_poly;
using evp::testing::sup_on_grid;

namespace {

double residual(const Environment& env, const PeriodicFunction& phi, const PeriodicFunction& psi) {
    return sup_on_grid([&](double x) {
        return env.p(x) * phi(x + env.alpha) + env.q(x) * phi(x - env.alpha) - phi(x) - psi(x);
    });
}

Environment symmetric_env() { return classify_log_odds(kGolden, PeriodicFunction::cosine(1)); }
Environment asymmetric_env() { return classify_log_odds(kGolden, 0.5 + PeriodicFunction::cosine(1)); }

}  // namespace

TEST(Center, Examples) {
    const auto rho = 1.0 + PeriodicFunction::cosine(1, 0.5);
    EXPECT_EQ(center(rho, PeriodicFunction::constant(5.0)).cr_norm_upper(0), 0.0);
    const auto c = PeriodicFunction::cosine(1);
    EXPECT_NEAR(center(PeriodicFunction::constant(1.0), c).mean(), 0.0, 1e-16);
    const auto shifted = center(rho, c);
    EXPECT_NEAR(shifted.mean(), -0.25, 1e-15);
    EXPECT_NEAR(shifted.coefficient(1).real(), 0.5, 1e-15);
}

TEST(SolvePoisson, ConstantHalfClosedForm) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto d = invariant_density(env);
    const auto cert = solve_poisson(env, d, PeriodicFunction::cosine(1));
    EXPECT_LT(cert.residual_sup, 1e-12);
    const double c = std::cos(kTwoPi * kGolden);
    for (double x : {0.0, 0.3, 0.8}) EXPECT_NEAR(cert.phi(x), std::cos(kTwoPi * x) / (c - 1.0), 1e-12);
}

TEST(SolvePoisson, ZeroGivesZero) {
    const auto env = symmetric_env();
    const auto cert = solve_poisson(env, invariant_density(env), PeriodicFunction());
    EXPECT_LT(cert.phi.cr_norm_upper(0), 1e-15);
}

TEST(SolvePoisson, ConstantTwoThirdsModeSolve) {
    const auto env = classify(kGolden, PeriodicFunction::constant(2.0 / 3.0));
    const auto cert = solve_poisson(env, invariant_density(env), PeriodicFunction::cosine(1));
    EXPECT_EQ(cert.branch, Branch::Asymmetric);
    EXPECT_LT(cert.residual_sup, 1e-12);
    for (int k : {-1, 1}) {
        const Complex m = (2.0 / 3.0) * unit_phase(k * kGolden) + (1.0 / 3.0) * unit_phase(-k * kGolden) - 1.0;
        EXPECT_LT(std::abs(cert.phi.coefficient(k) - 0.5 / m), 1e-13);
    }
}

TEST(SolvePoisson, BothEnvironmentsBothObservables) {
    const auto psi2 = PeriodicFunction::cosine(1) + PeriodicFunction::cosine(3, 0.5);
    for (const auto& env : {symmetric_env(), asymmetric_env()}) {
        const auto d = invariant_density(env);
        for (const auto& raw : {PeriodicFunction::cosine(1), psi2}) {
            const auto cert = solve_poisson(env, d, center(d.rho, raw));
            EXPECT_LT(cert.residual_sup, 1e-9);
            EXPECT_LT(residual(env, cert.phi, cert.psi), 1e-9);
            EXPECT_LT(std::abs(pairing(d.rho, cert.psi)), 1e-10);
            EXPECT_TRUE(std::isfinite(cert.norm_ratio));
        }
    }
}

TEST(SolvePoisson, UncenteredInputRejected) {
    const auto env = asymmetric_env();
    const auto d = invariant_density(env);
    EXPECT_EQ(code_of([&] { solve_poisson(env, d, PeriodicFunction::cosine(1)); }), ErrorCode::CenteringViolation);
}

TEST(SolvePoisson, Linearity) {
    const auto env = symmetric_env();
    const auto d = invariant_density(env);
    std::mt19937_64 rng(41);
    const auto a = center(d.rho, random_poly(rng, 5));
    const auto b = center(d.rho, random_poly(rng, 5));
    const auto pa = solve_poisson(env, d, a).phi;
    const auto pb = solve_poisson(env, d, b).phi;
    const auto pab = solve_poisson(env, d, a + 2.0 * b).phi;
    // Solutions are unique up to constants.
    const auto diff = pab - pa - 2.0 * pb;
    EXPECT_LT(sup_on_grid([&](double x) { return diff(x) - diff.mean(); }), 1e-10);
}

TEST(SolvePoisson, Telescoping) {
    const auto env = asymmetric_env();
    const auto d = invariant_density(env);
    const auto cert = solve_poisson(env, d, center(d.rho, PeriodicFunction::cosine(2)));
    PeriodicFunction tn_phi = cert.phi;
    PeriodicFunction sum;
    PeriodicFunction tj_psi = cert.psi;
    for (int n = 1; n <= 8; ++n) {
        sum = sum + tj_psi;
        tj_psi = apply_T(env, tj_psi).trimmed(1e-18);
        tn_phi = apply_T(env, tn_phi).trimmed(1e-18);
        const auto gap = tn_phi - cert.phi - sum;
        EXPECT_LT(sup_on_grid([&](double x) { return gap(x); }), n * 1e-9) << n;
    }
}

TEST(SolvePoisson, IteratedLevels) {
    const auto env = symmetric_env();
    const auto d = invariant_density(env);
    const auto psi = center(d.rho, PeriodicFunction::cosine(1));
    const auto chain = solve_poisson_iterated(env, d, psi, 3);
    ASSERT_EQ(chain.size(), 3u);
    for (std::size_t j = 0; j < chain.size(); ++j) {
        EXPECT_EQ(chain[j].level, static_cast<int>(j) + 1);
        EXPECT_LT(chain[j].residual_sup, 1e-9);
    }
    // (T - I) phi_2 = phi_1 - mean(rho phi_1)
    const auto lhs = apply_T(env, chain[1].phi) - chain[1].phi;
    const auto rhs = center(d.rho, chain[0].phi);
    EXPECT_LT(sup_on_grid([&](double x) { return lhs(x) - rhs(x); }), 1e-9);
}

TEST(CltVariance, ClosedFormAndDegenerateCases) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto d = invariant_density(env);
    const auto cert = solve_poisson(env, d, PeriodicFunction::cosine(1));
    const double c = std::cos(kTwoPi * kGolden);
    EXPECT_NEAR(clt_variance(env, d.rho, cert.phi), (1.0 + c) / (2.0 * (1.0 - c)), 1e-12);
    EXPECT_EQ(clt_variance(env, d.rho, PeriodicFunction::constant(4.0)), 0.0);
    const auto zero = solve_poisson(env, d, PeriodicFunction());
    EXPECT_LT(clt_variance(env, d.rho, zero.phi), 1e-30);
}
