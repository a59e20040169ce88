#include "evp/montecarlo.hpp"
#include "evp/poisson.hpp"
#include "evp/walk.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace evp;
using evp::testing::code_of;
using evp::testing::kGolden;

namespace {

Environment logistic_env() { return classify_log_odds(kGolden, PeriodicFunction::cosine(1)); }

// Law of X_n by summing over all 2^n step sequences.
std::map<int, double> enumerate_paths(const Environment& env, double x, int n) {
    std::map<int, double> law;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int m = 0;
        double prob = 1.0;
        for (int k = 0; k < n; ++k) {
            const double p = env.p(x + m * env.alpha);
            if (mask >> k & 1u) {
                prob *= p;
                ++m;
            } else {
                prob *= 1.0 - p;
                --m;
            }
        }
        law[m] += prob;
    }
    return law;
}

double sum_of(const LatticeDistribution& d) {
    double s = 0.0;
    for (double v : d.probabilities) s += v;
    return s;
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    EXPECT_EQ(Philox::block(A4{0, 0, 0, 0}, A2{0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox::block(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}),
              (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox::block(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}),
              (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, JumpMatchesSequentialDraws) {
    Philox a(7, 3);
    for (int i = 0; i < 40; ++i) a.next_u32();
    Philox b(7, 3);
    b.jump(10);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(a.next_u32(), b.next_u32());
    Philox c(7, 4);
    Philox d(7, 3, 10);
    EXPECT_NE(c.next_u32(), Philox(7, 3).next_u32());
    Philox e(7, 3);
    e.jump(10);
    EXPECT_EQ(d.next_u32(), e.next_u32());
}

TEST(EvolveExact, TrivialCases) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto d0 = evolve_exact(env, 0.3, 0);
    ASSERT_EQ(d0.probabilities.size(), 1u);
    EXPECT_EQ(d0.at(0), 1.0);
    const auto d2 = evolve_exact(env, 0.3, 2);
    EXPECT_EQ(d2.at(-2), 0.25);
    EXPECT_EQ(d2.at(0), 0.5);
    EXPECT_EQ(d2.at(2), 0.25);
    EXPECT_EQ(d2.at(1), 0.0);
}

TEST(EvolveExact, ExhaustivePathOracle) {
    const auto env = logistic_env();
    const auto d = evolve_exact(env, 0.3, 5);
    const auto law = enumerate_paths(env, 0.3, 5);
    for (int m = -5; m <= 5; ++m) {
        const auto it = law.find(m);
        EXPECT_NEAR(d.at(m), it == law.end() ? 0.0 : it->second, 1e-14) << m;
    }
    const auto psi = PeriodicFunction::cosine(1) + PeriodicFunction::sine(2, 0.4);
    double oracle = 0.0;
    for (const auto& [m, pr] : law) oracle += pr * psi(0.3 + m * kGolden);
    EXPECT_NEAR(expectation(d, psi), oracle, 1e-14);
}

TEST(EvolveExact, ParityMassAndCap) {
    const auto env = logistic_env();
    const auto d = evolve_exact(env, 0.1, 10000);
    for (int m = -10000; m <= 10000; ++m) {
        if ((m + 10000) % 2 != 0) {
            ASSERT_EQ(d.at(m), 0.0) << m;
        }
    }
    EXPECT_LT(std::abs(sum_of(d) - 1.0), 1e-12);
    EXPECT_LE(d.mass_drift, 1e-12);
    EXPECT_EQ(code_of([&] { evolve_exact(env, 0.1, 100, 64); }), ErrorCode::CapExceeded);
}

TEST(EvolveExact, SemigroupProperty) {
    const auto env = classify_log_odds(kGolden, 0.5 + PeriodicFunction::cosine(1));
    for (int n : {1, 17, 64}) {
        for (int m : {1, 30, 64}) {
            const auto direct = evolve_exact(env, 0.42, n + m);
            const auto first = evolve_exact(env, 0.42, n);
            const auto table = transition_table(env, 0.42, n + m);
            const auto composed = evolve(table, first, m);
            for (int j = -(n + m); j <= n + m; ++j) ASSERT_NEAR(direct.at(j), composed.at(j), 1e-12);
        }
    }
}

TEST(EvolveExact, ForwardBackwardDuality) {
    const auto env = logistic_env();
    const auto psi = PeriodicFunction::cosine(1) + PeriodicFunction::cosine(3, 0.5);
    PeriodicFunction tpsi = psi;
    for (int n = 1; n <= 256; ++n) {
        tpsi = apply_T(env, tpsi).trimmed(1e-17);
        if (n % 32 == 0 || n < 4) {
            const double forward = expectation(evolve_exact(env, 0.77, n), psi);
            EXPECT_NEAR(forward, tpsi(0.77), n * 1e-12) << n;
        }
    }
}

TEST(Expectation, ConstantsAndPointMass) {
    const auto env = logistic_env();
    EXPECT_NEAR(expectation(evolve_exact(env, 0.2, 50), PeriodicFunction::constant(1.0)), 1.0, 1e-14);
    const auto psi = PeriodicFunction::cosine(2);
    EXPECT_DOUBLE_EQ(expectation(evolve_exact(env, 0.2, 0), psi), psi(0.2));
}

TEST(MixingCurve, ConstantHalfGeometricDecay) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto curve = mixing_curve(env, 0.3, PeriodicFunction::cosine(1), 0.0, {1, 2, 8, 32, 128, 256});
    const double c = std::cos(kTwoPi * kGolden);
    for (const auto& row : curve.rows) {
        EXPECT_NEAR(row.expectation, std::pow(c, row.n) * std::cos(kTwoPi * 0.3), 1e-12) << row.n;
    }
    const auto flat = mixing_curve(env, 0.3, PeriodicFunction::constant(1.0), 1.0, {4, 8, 16});
    for (const auto& row : flat.rows) EXPECT_NEAR(row.gap, 0.0, 1e-14);
}

TEST(MixingCurve, SlopeFitOnSyntheticPowerLaw) {
    std::vector<int> ns{8, 16, 32, 64, 128};
    std::vector<double> gaps;
    for (int n : ns) gaps.push_back(3.0 * std::pow(n, -2.5));
    const auto fit = fit_loglog(ns, gaps, 8, 128);
    EXPECT_NEAR(fit.slope, -2.5, 1e-12);
    EXPECT_NEAR(fit.r2, 1.0, 1e-12);
    const auto w = upper_half_window(ns);
    EXPECT_EQ(w.second, 128);
    EXPECT_LE(w.first, 64);
}

TEST(Cesaro, ConstantAndFairCoin) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto c = cesaro_nu(env, PeriodicFunction::constant(2.5), 100, {0.1, 0.6});
    EXPECT_NEAR(c.estimate, 2.5, 1e-13);
    EXPECT_NEAR(c.spread, 0.0, 1e-13);
    // Geometric series of (cos 2 pi a)^n cos 2 pi x.
    const double r = std::cos(kTwoPi * kGolden);
    for (int N : {64, 512, 4096}) {
        const auto e = cesaro_nu(env, PeriodicFunction::cosine(1), N, {0.0});
        const double oracle = r * (1.0 - std::pow(r, N)) / (1.0 - r) / N;
        EXPECT_NEAR(e.estimate, oracle, 1e-13);
        EXPECT_LE(std::abs(e.estimate), 1.0 / N);
    }
}

TEST(Cesaro, AgreesWithDensityFromEightStarts) {
    const auto env = classify_log_odds(kGolden, 0.5 + PeriodicFunction::cosine(1));
    const auto d = invariant_density(env);
    const auto psi = PeriodicFunction::cosine(1) + PeriodicFunction::sine(2, 0.5);
    std::vector<double> starts;
    for (int i = 0; i < 8; ++i) starts.push_back((i + 0.5) / 8.0);
    const auto c = cesaro_nu(env, psi, 1 << 13, starts);
    for (double v : c.per_start) EXPECT_NEAR(v, pairing(d.rho, psi), 1e-2);
}

TEST(SamplePath, DeterministicAndNonLazyHolding) {
    const auto env = logistic_env();
    const auto a = sample_path(env, 0.3, 500, 99, 4);
    const auto b = sample_path(env, 0.3, 500, 99, 4);
    EXPECT_EQ(a.offsets, b.offsets);
    EXPECT_EQ(a.seed, 99u);
    EXPECT_EQ(a.stream, 4u);
    for (int h : a.holding) EXPECT_EQ(h, 1);
    const auto lazy0 = make_lazy(env, PeriodicFunction::constant(0.0), 0.0);
    const auto c = sample_path(lazy0, 0.3, 300, 5);
    for (int h : c.holding) EXPECT_EQ(h, 1);
}

TEST(SamplePath, LazyHalfHoldingMeanIsTwo) {
    const auto env = logistic_env();
    const auto lazy = make_lazy(env, PeriodicFunction::constant(0.5));
    const auto path = sample_path(lazy, 0.3, 220000, 2024);
    ASSERT_GE(path.holding.size(), 100001u);
    double sum = 0.0;
    const std::size_t sites = 100000;
    for (std::size_t i = 0; i < sites; ++i) {
        ASSERT_GE(path.holding[i], 1);
        sum += path.holding[i];
    }
    EXPECT_NEAR(sum / sites, 2.0, 0.04);
    for (std::size_t i = 1; i < path.accelerated.size(); ++i) ASSERT_NE(path.accelerated[i], path.accelerated[i - 1]);
}

TEST(SegmentStop, ArithmeticOfTheStoppingRule) {
    PathSample path;
    path.stays.assign(40, 0.5);
    path.accelerated.resize(40);
    path.holding.assign(40, 2);
    const auto seg = segment_stop(path, 0.5, 100);
    EXPECT_EQ(seg.length(), 13u);
    EXPECT_DOUBLE_EQ(seg.T_W, 26.0);
    EXPECT_EQ(code_of([&] { segment_stop(path, 0.0, 100); }), ErrorCode::InvalidArgument);
    path.stays.resize(5);
    path.accelerated.resize(5);
    path.holding.resize(5);
    EXPECT_EQ(code_of([&] { segment_stop(path, 0.5, 100); }), ErrorCode::SegmentIncomplete);
}

TEST(SegmentStop, PrefixPropertyOnRandomPaths) {
    const auto env = logistic_env();
    const auto lazy = make_lazy(env, 0.4 + PeriodicFunction::cosine(1, 0.2));
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto path = sample_path(lazy, 0.1, 400, 77, s);
        const double level = 0.2 * 100 / 2.0;
        const auto seg = segment_stop(path, 0.2, 100);
        ASSERT_GE(seg.T_W, level);
        double prefix = 0.0;
        for (std::size_t i = 0; i + 1 < seg.stays.size(); ++i) prefix += 1.0 / (1.0 - seg.stays[i]);
        ASSERT_LT(prefix, level) << s;
    }
}

TEST(MonteCarlo, EmpiricalLawMatchesExact) {
    const auto env = logistic_env();
    const auto exact = evolve_exact(env, 0.3, 10);
    const auto emp = empirical_distribution(env, 0.3, 10, 100000, 12345);
    EXPECT_LT(total_variation(exact, emp), 0.02);
    const auto again = empirical_distribution(env, 0.3, 10, 100000, 12345, 1);
    EXPECT_EQ(emp.probabilities, again.probabilities);
}

TEST(DensitySampler, QuantilesOfUniformAndTilted) {
    const DensitySampler uniform(PeriodicFunction::constant(1.0));
    for (double u : {0.0, 0.25, 0.5, 0.9}) EXPECT_NEAR(uniform(u), u, 1e-12);
    // rho = 1 + 0.5 cos: CDF F(x) = x + sin(2 pi x) / (4 pi).
    const DensitySampler tilted(1.0 + PeriodicFunction::cosine(1, 0.5));
    for (double x : {0.1, 0.3, 0.6, 0.85}) {
        const double u = x + std::sin(kTwoPi * x) / (2.0 * kTwoPi);
        EXPECT_NEAR(tilted(u), x, 1e-6);
    }
}

TEST(Clt, ZeroObservableAndSmallRun) {
    const auto env = classify(kGolden, PeriodicFunction::constant(0.5));
    const auto d = invariant_density(env);
    const auto zero = clt_experiment(env, d.rho, PeriodicFunction(), 0.0, 100, 50, 1);
    EXPECT_EQ(zero.variance, 0.0);
    EXPECT_FALSE(zero.degenerate);

    const auto psi = PeriodicFunction::cosine(1);
    const auto cert = solve_poisson(env, d, psi);
    const double sigma2 = clt_variance(env, d.rho, cert.phi);
    const auto r = clt_experiment(env, d.rho, psi, sigma2, 2000, 4000, 8);
    EXPECT_NEAR(r.variance, sigma2, 0.1 * sigma2);
    EXPECT_LT(r.ks, 0.05);
    const auto r1 = clt_experiment(env, d.rho, psi, sigma2, 200, 100, 8, 1);
    const auto r2 = clt_experiment(env, d.rho, psi, sigma2, 200, 100, 8, 4);
    EXPECT_EQ(r1.variance, r2.variance);
    const auto deg = clt_experiment(env, d.rho, psi, 0.0, 50, 20, 1);
    EXPECT_TRUE(deg.degenerate);
}

TEST(Clt, KolmogorovSmirnovOfExactQuantiles) {
    std::vector<double> xs;
    const int n = 999;
    for (int i = 1; i <= n; ++i) {
        // Normal quantiles at i/(n+1) by bisection on erfc.
        const double u = static_cast<double>(i) / (n + 1);
        double lo = -10, hi = 10;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
        }
        xs.push_back(2.0 * lo);
    }
    EXPECT_LT(kolmogorov_smirnov_normal(xs, 4.0), 1.5 / n);
    // Against N(0, 1) the largest gap is Phi(x) - Phi(x/2) at x^2 = 8 ln 2 / 3.
    const double x = std::sqrt(8.0 * std::log(2.0) / 3.0);
    const double gap = 0.5 * (std::erfc(-x / std::sqrt(2.0)) - std::erfc(-x / (2.0 * std::sqrt(2.0))));
    EXPECT_NEAR(kolmogorov_smirnov_normal(xs, 1.0), gap, 2.0 / n);
}
