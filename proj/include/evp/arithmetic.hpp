#pragma once

// Continued fractions of rotation numbers, empirical Diophantine profiles, and
// the construction of Liouville-type rotation numbers with scheduled
// approximation quality.

#include "evp/multiprecision.hpp"

#include <optional>
#include <string>
#include <vector>

namespace evp {

/// Certified enclosure lower <= alpha <= upper of a real number in (0, 1).
/// lower == upper means alpha is known exactly (and is then rational).
struct RealEnclosure {
    BigRational lower;
    BigRational upper;
    unsigned precision_bits = kDefaultPrecisionBits;

    bool exact() const { return lower == upper; }
    BigRational midpoint() const { return (lower + upper) / 2; }
    BigFloat value() const;  // midpoint at precision_bits
    double to_double() const;

    static RealEnclosure exact_value(const BigRational& q, unsigned bits = kDefaultPrecisionBits);
    /// x +- radius, radius >= 0.
    static RealEnclosure around(const BigFloat& x, const BigRational& radius, unsigned bits);
};

/// Parses a rotation-number expression. Accepted forms:
///   decimals and integers (exact), + - * / ( ), sqrt(...),
///   `golden` = (sqrt(5)-1)/2,
///   `liouville(N)` = sum_{n=1}^N 10^{-n!} (exact),
///   `cf(a1,...,ak)` = [0; a1,...,ak] (exact),
///   `cf_golden(a1,...,ak)` = [0; a1,...,ak,1,1,1,...].
/// Pure rational expressions stay exact; anything involving sqrt or a golden
/// tail is evaluated at `bits` with a conservative rounding radius.
RealEnclosure parse_alpha(const std::string& expression, unsigned bits = kDefaultPrecisionBits);

struct Convergent {
    BigInt p;
    BigInt q;
};

struct RotationNumber {
    RealEnclosure alpha;
    std::vector<BigInt> partial_quotients;  // a_1 .. a_D
    std::vector<Convergent> convergents;    // p_k / q_k, k = 1 .. D
    int requested_depth = 0;
    bool exhausted = false;  // expansion stopped before requested_depth

    int depth() const { return static_cast<int>(partial_quotients.size()); }
    double value() const { return alpha.to_double(); }
};

/// Partial quotients and convergents of alpha to `depth`. Throws
/// RationalAtPrecision if the certified expansion terminates first, naming
/// the last exact convergent.
RotationNumber continued_fraction(const RealEnclosure& alpha, int depth);

/// As many certified partial quotients as the enclosure supports, up to
/// max_depth. Never throws for rational input.
RotationNumber continued_fraction_max(const RealEnclosure& alpha, int max_depth = 10000);

struct DiophantineProfile {
    double c_est = 0.0;
    double tau_est = 0.0;
    int m0 = 2;
    int witness_depth = 0;
    bool liouville_like = false;
};

/// Empirical (c, tau) from observed convergents only; labelled "empirical at
/// depth D". Needs at least 3 convergents.
DiophantineProfile diophantine_profile(const RotationNumber& rot);

/// Smallest integer strictly greater than 1 + tau.
int m0_for_tau(double tau);

struct LiouvilleStage {
    int index = 0;       // stage n (1-based)
    int cf_index = 0;    // convergent index k with (p_k, q_k) = (p_n, q_n)
    BigInt p;
    BigInt q;
    double gamma = 2.0;
};

struct LiouvilleSchedule {
    RotationNumber alpha;
    std::vector<LiouvilleStage> stages;
    bool growth_enforced = false;
    bool truncated = false;
    std::string notice;
};

struct LiouvilleOptions {
    bool enforce_growth = true;
    unsigned precision_bits = kDefaultPrecisionBits;
    /// When set, stages must be found among the seed's convergents; the
    /// expansion is not extended.
    std::optional<RotationNumber> seed;
};

/// Builds alpha = [0; q_min, a_2, ..., a_{N+1}, 1, 1, ...] so that stage n uses
/// the n-th convergent and |q_n alpha - p_n| < 1/(16 q_n^{gamma_n}) for every
/// tail. With enforce_growth, q_n^{-sqrt(n+1)} < 0.001 q_{n-1}^{-sqrt(n)}.
LiouvilleSchedule liouville_alpha(const std::vector<double>& gammas, int q_min,
                                  const LiouvilleOptions& options = {});

/// |q alpha - p| < 1 / (16 q^gamma) for every alpha in the enclosure.
bool approximation_inequality_holds(const RealEnclosure& alpha, const BigInt& p, const BigInt& q,
                                    double gamma);

/// q_n^{-sqrt(n+1)} < 0.001 q_{n-1}^{-sqrt(n)}, evaluated at high precision.
bool growth_condition_holds(const BigInt& q_prev, const BigInt& q_next, int n);

}  // namespace evp
