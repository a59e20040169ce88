#include "evp/arithmetic.hpp"
#include "evp/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace evp;

namespace {

// Euclid on an exact rational, independent of the library's expansion.
std::vector<BigInt> euclid(BigRational x) {
    std::vector<BigInt> out;
    while (x != 0) {
        x = 1 / x;
        BigInt a = numerator(x) / denominator(x);
        out.push_back(a);
        x -= a;
    }
    return out;
}

BigRational liouville_sum(int N) {
    BigRational s = 0;
    for (int n = 1; n <= N; ++n) {
        int f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        s += BigRational(1, BigInt(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(f))));
    }
    return s;
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no evp::Error thrown";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ContinuedFraction, GoldenMeanGivesFibonacciConvergents) {
    const auto rot = continued_fraction(parse_alpha("golden"), 8);
    ASSERT_EQ(rot.depth(), 8);
    BigInt f0 = 1, f1 = 1;  // p_k = F_k, q_k = F_{k+1}
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ(rot.partial_quotients[k], 1);
        EXPECT_EQ(rot.convergents[k].p, f0);
        EXPECT_EQ(rot.convergents[k].q, f1);
        const BigInt f2 = f0 + f1;
        f0 = f1;
        f1 = f2;
    }
}

TEST(ContinuedFraction, SqrtTwoMinusOneIsAllTwos) {
    const auto rot = continued_fraction(parse_alpha("sqrt(2)-1"), 6);
    ASSERT_EQ(rot.depth(), 6);
    for (const auto& a : rot.partial_quotients) EXPECT_EQ(a, 2);
}

TEST(ContinuedFraction, TruncatedLiouvilleMatchesExactEuclid) {
    const auto alpha = parse_alpha("liouville(4)");
    ASSERT_TRUE(alpha.exact());
    EXPECT_EQ(alpha.lower, liouville_sum(4));
    const auto rot = continued_fraction_max(alpha);
    const auto expected = euclid(liouville_sum(4));
    ASSERT_EQ(rot.partial_quotients.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(rot.partial_quotients[k], expected[k]) << k;

    // The largest quotient sits after q = 10^6 and certifies the quadratic inequality there.
    std::size_t giant = 0;
    for (std::size_t k = 1; k + 1 < expected.size(); ++k) {
        if (expected[k] > expected[giant]) giant = k;
    }
    ASSERT_GT(giant, 0u);
    const auto& c = rot.convergents[giant - 1];
    EXPECT_EQ(c.q, BigInt(1000000));
    EXPECT_TRUE(approximation_inequality_holds(alpha, c.p, c.q, 2.0));
    EXPECT_GT(expected[giant], BigInt(1000000000));
}

TEST(ContinuedFraction, RationalInputNamesLastConvergent) {
    try {
        continued_fraction(parse_alpha("3/7"), 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RationalAtPrecision);
        EXPECT_NE(std::string(e.what()).find("3/7"), std::string::npos) << e.what();
    }
}

TEST(ContinuedFraction, DeterminantAlternates) {
    for (const char* expr : {"golden", "sqrt(2)-1", "sqrt(3)-1", "liouville(3)", "cf_golden(3,7,15,1,292)"}) {
        const auto rot = continued_fraction_max(parse_alpha(expr), 40);
        BigInt p_prev = 0, q_prev = 1;
        for (int k = 0; k < rot.depth(); ++k) {
            const auto& c = rot.convergents[k];
            const BigInt det = c.p * q_prev - p_prev * c.q;
            EXPECT_EQ(det, (k % 2 == 0) ? 1 : -1) << expr << " k=" << k;
            if (k > 0) {
                EXPECT_GT(c.q, q_prev);
            }
            p_prev = c.p;
            q_prev = c.q;
        }
    }
}

TEST(ContinuedFraction, ConvergentApproximationBound) {
    const auto rot = continued_fraction(parse_alpha("sqrt(3)-1"), 30);
    const BigRational a = rot.alpha.midpoint();
    for (int k = 0; k + 1 < rot.depth(); ++k) {
        const auto& c = rot.convergents[k];
        BigRational err = c.q * a - c.p;
        if (err < 0) err = -err;
        EXPECT_LT(err, BigRational(1, rot.convergents[k + 1].q));
    }
}

TEST(DiophantineProfile, BoundedTypeHasTauZero) {
    for (const char* expr : {"golden", "sqrt(2)-1"}) {
        const auto prof = diophantine_profile(continued_fraction(parse_alpha(expr), 30));
        EXPECT_EQ(prof.tau_est, 0.0) << expr;
        EXPECT_EQ(prof.m0, 2);
        EXPECT_FALSE(prof.liouville_like);
        EXPECT_GT(prof.c_est, 0.0);
    }
}

TEST(DiophantineProfile, CEstimateIsALowerBoundOverConvergents) {
    const auto rot = continued_fraction(parse_alpha("cf_golden(2,5,40,1,3)"), 20);
    const auto prof = diophantine_profile(rot);
    const BigRational a = rot.alpha.midpoint();
    for (int k = 0; k + 1 < rot.depth(); ++k) {
        const auto& c = rot.convergents[k];
        BigRational d = a - BigRational(c.p, c.q);
        if (d < 0) d = -d;
        const double lhs = std::pow(static_cast<double>(c.q), 2.0 + prof.tau_est) * static_cast<double>(d);
        EXPECT_GE(lhs * (1 + 1e-12), prof.c_est) << k;
    }
}

TEST(DiophantineProfile, M0CeilingRule) {
    EXPECT_EQ(m0_for_tau(0.0), 2);
    EXPECT_EQ(m0_for_tau(0.5), 2);
    EXPECT_EQ(m0_for_tau(1.0), 3);
    EXPECT_EQ(m0_for_tau(2.7), 4);
    for (double tau : {0.0, 0.3, 1.0, 1.9, 4.0}) {
        const int m0 = m0_for_tau(tau);
        EXPECT_GE(m0, 2);
        EXPECT_LE(m0 - 1, tau + 1);
        EXPECT_LT(tau + 1, m0);
    }
}

TEST(DiophantineProfile, LiouvilleLikeAndMonotoneInDepth) {
    const auto alpha = parse_alpha("liouville(4)");
    const auto full = continued_fraction_max(alpha);
    double previous = 0.0;
    for (int d = 3; d <= full.depth(); ++d) {
        const auto prof = diophantine_profile(continued_fraction(alpha, d));
        EXPECT_GE(prof.tau_est, previous) << d;
        previous = prof.tau_est;
    }
    const auto prof = diophantine_profile(full);
    EXPECT_TRUE(prof.liouville_like);
    EXPECT_GT(prof.tau_est, 1.0);
}

TEST(DiophantineProfile, TooShortThrows) {
    EXPECT_EQ(code_of([] { diophantine_profile(continued_fraction(parse_alpha("golden"), 2)); }),
              ErrorCode::InsufficientDepth);
}

TEST(LiouvilleAlpha, TwoStageScheduleVerifies) {
    const auto sched = liouville_alpha({2.0, 3.0}, 2);
    ASSERT_EQ(sched.stages.size(), 2u);
    EXPECT_FALSE(sched.truncated);
    for (const auto& st : sched.stages) {
        EXPECT_TRUE(approximation_inequality_holds(sched.alpha.alpha, st.p, st.q, st.gamma));
        // Independent check at the rational midpoint.
        BigRational err = st.q * sched.alpha.alpha.midpoint() - st.p;
        if (err < 0) err = -err;
        const double bound = 1.0 / (16.0 * std::pow(static_cast<double>(st.q), st.gamma));
        EXPECT_LT(static_cast<double>(err), bound);
    }
    EXPECT_EQ(sched.stages[0].q, 2);
    const double q1 = static_cast<double>(sched.stages[0].q);
    const double q2 = static_cast<double>(sched.stages[1].q);
    EXPECT_LT(std::pow(q2, -std::sqrt(3.0)), 0.001 * std::pow(q1, -std::sqrt(2.0)));
    EXPECT_TRUE(growth_condition_holds(sched.stages[0].q, sched.stages[1].q, 2));
}

TEST(LiouvilleAlpha, RoundTripReproducesSchedule) {
    const auto sched = liouville_alpha({2.0, 2.5, 3.0}, 3);
    const auto again = continued_fraction(sched.alpha.alpha, sched.alpha.depth());
    for (const auto& st : sched.stages) {
        const auto& c = again.convergents[st.cf_index - 1];
        EXPECT_EQ(c.p, st.p);
        EXPECT_EQ(c.q, st.q);
    }
}

TEST(LiouvilleAlpha, GoldenSeedIsInfeasible) {
    LiouvilleOptions opts;
    opts.seed = continued_fraction(parse_alpha("golden"), 40);
    EXPECT_EQ(code_of([&] { liouville_alpha({2.0, 3.0}, 2, opts); }), ErrorCode::StageInfeasible);
}

TEST(LiouvilleAlpha, PrecisionExhaustionTruncates) {
    LiouvilleOptions opts;
    opts.precision_bits = 160;
    const auto sched = liouville_alpha({2.0, 3.0, 4.0, 5.0}, 2, opts);
    EXPECT_TRUE(sched.truncated);
    EXPECT_LT(sched.stages.size(), 4u);
    EXPECT_FALSE(sched.notice.empty());
}

TEST(LiouvilleAlpha, RejectsBadArguments) {
    EXPECT_EQ(code_of([] { liouville_alpha({}, 2); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { liouville_alpha({3.0, 2.0}, 2); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { liouville_alpha({2.0}, 1); }), ErrorCode::InvalidArgument);
}
