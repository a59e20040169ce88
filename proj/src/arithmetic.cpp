#include "evp/arithmetic.hpp"

#include "evp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace evp {

namespace {

BigInt floor_positive(const BigRational& x) { return numerator(x) / denominator(x); }

std::string convergent_text(const RotationNumber& rot) {
    if (rot.convergents.empty()) return "0/1";
    const Convergent& c = rot.convergents.back();
    return c.p.str() + "/" + c.q.str();
}

/// Euclid on both ends of the enclosure; a quotient is kept only while both
/// ends agree on it.
RotationNumber expand(const RealEnclosure& alpha, int max_depth, bool& ended_exactly) {
    if (alpha.lower <= 0 || alpha.upper >= 1 || alpha.lower > alpha.upper) {
        throw Error(ErrorCode::InvalidArgument, "rotation number enclosure must lie inside (0, 1)");
    }
    RotationNumber rot;
    rot.alpha = alpha;
    rot.requested_depth = max_depth;
    ended_exactly = false;

    BigRational lo = alpha.lower;
    BigRational hi = alpha.upper;
    BigInt p_prev = 1, q_prev = 0, p = 0, q = 1;
    while (rot.depth() < max_depth) {
        if (lo == 0 && hi == 0) {
            ended_exactly = true;
            break;
        }
        if (lo <= 0) break;  // enclosure reaches an endpoint of a cylinder
        const BigRational inv_lo = 1 / hi;
        const BigRational inv_hi = 1 / lo;
        const BigInt a = floor_positive(inv_lo);
        if (floor_positive(inv_hi) != a) break;
        rot.partial_quotients.push_back(a);
        BigInt pn = a * p + p_prev;
        BigInt qn = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        rot.convergents.push_back({p, q});
        lo = inv_lo - a;
        hi = inv_hi - a;
    }
    rot.exhausted = rot.depth() < max_depth;
    return rot;
}

}  // namespace

BigFloat RealEnclosure::value() const {
    PrecisionScope scope(precision_bits);
    return to_float(midpoint());
}

double RealEnclosure::to_double() const { return static_cast<double>(midpoint()); }

RealEnclosure RealEnclosure::exact_value(const BigRational& q, unsigned bits) {
    return RealEnclosure{q, q, bits};
}

RealEnclosure RealEnclosure::around(const BigFloat& x, const BigRational& radius, unsigned bits) {
    const BigRational centre = to_rational(x);
    return RealEnclosure{centre - radius, centre + radius, bits};
}

RotationNumber continued_fraction(const RealEnclosure& alpha, int depth) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "continued fraction depth must be >= 1");
    bool ended_exactly = false;
    RotationNumber rot = expand(alpha, depth, ended_exactly);
    if (rot.depth() < depth) {
        throw Error(ErrorCode::RationalAtPrecision,
                    std::string(ended_exactly ? "alpha is rational" : "precision exhausted") + " after " +
                        std::to_string(rot.depth()) + " partial quotients; last exact convergent " +
                        convergent_text(rot));
    }
    return rot;
}

RotationNumber continued_fraction_max(const RealEnclosure& alpha, int max_depth) {
    bool ended_exactly = false;
    RotationNumber rot = expand(alpha, max_depth, ended_exactly);
    if (rot.depth() == 0) {
        throw Error(ErrorCode::RationalAtPrecision, "no partial quotient is certified at this precision");
    }
    return rot;
}

int m0_for_tau(double tau) { return static_cast<int>(std::floor(1.0 + tau)) + 1; }

DiophantineProfile diophantine_profile(const RotationNumber& rot) {
    const int depth = rot.depth();
    if (depth < 3) {
        throw Error(ErrorCode::InsufficientDepth,
                    "need at least 3 convergents, have " + std::to_string(depth));
    }
    PrecisionScope scope(rot.alpha.precision_bits);
    // Bounded-type allowance: quotients up to this size never raise tau.
    const BigFloat allowance = 16;

    double tau = 0.0;
    for (int k = 0; k + 1 < depth; ++k) {
        const BigInt& q = rot.convergents[k].q;
        if (q < 2) continue;
        const BigFloat ratio = log(BigFloat(rot.partial_quotients[k + 1]) / allowance) / log(BigFloat(q));
        tau = std::max(tau, static_cast<double>(ratio));
    }

    const BigFloat alpha = rot.alpha.value();
    double c_est = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < depth; ++k) {
        const Convergent& c = rot.convergents[k];
        const BigFloat distance = abs(alpha - BigFloat(c.p) / BigFloat(c.q));
        if (distance == 0) continue;
        const BigFloat scaled = pow(BigFloat(c.q), BigFloat(2.0 + tau)) * distance;
        c_est = std::min(c_est, static_cast<double>(scaled));
    }

    DiophantineProfile profile;
    profile.tau_est = tau;
    profile.c_est = c_est;
    profile.m0 = m0_for_tau(tau);
    profile.witness_depth = depth;
    profile.liouville_like = tau > 1.0;
    return profile;
}

bool approximation_inequality_holds(const RealEnclosure& alpha, const BigInt& p, const BigInt& q,
                                    double gamma) {
    const BigRational qr(q);
    const BigRational pr(p);
    const BigRational worst = std::max(abs(qr * alpha.lower - pr), abs(qr * alpha.upper - pr));
    if (gamma == std::floor(gamma) && gamma >= 0 && gamma < 1e6) {
        const BigInt q_pow = boost::multiprecision::pow(q, static_cast<unsigned>(gamma));
        return worst * 16 * BigRational(q_pow) < 1;
    }
    PrecisionScope scope(alpha.precision_bits + 64);
    const BigFloat bound = 1 / (16 * pow(BigFloat(q), BigFloat(gamma)));
    // Margin covers the rounding of pow.
    return to_float(worst) * (1 + BigFloat(1e-30)) < bound;
}

bool growth_condition_holds(const BigInt& q_prev, const BigInt& q_next, int n) {
    PrecisionScope scope(256);
    const BigFloat lhs = sqrt(BigFloat(n + 1)) * log(BigFloat(q_next)) - sqrt(BigFloat(n)) * log(BigFloat(q_prev));
    return lhs > log(BigFloat(1000)) + BigFloat(1e-40);
}

namespace {

BigInt ceil_div_positive(const BigInt& a, const BigInt& b) {
    if (a <= 0) return 0;
    return (a + b - 1) / b;
}

/// Smallest integer >= 16 q^gamma.
BigInt approximation_bound(const BigInt& q, double gamma, unsigned bits) {
    if (gamma == std::floor(gamma)) {
        return 16 * boost::multiprecision::pow(q, static_cast<unsigned>(gamma));
    }
    PrecisionScope scope(bits + 64);
    const BigFloat bound = 16 * pow(BigFloat(q), BigFloat(gamma));
    return BigInt(ceil(bound)) + 1;
}

/// Smallest integer Q with Q^{sqrt(n+1)} > 1000 q_prev^{sqrt(n)} (up to a
/// final exact check done by the caller).
BigInt growth_bound(const BigInt& q_prev, int n) {
    PrecisionScope scope(256);
    const BigFloat log_q = (log(BigFloat(1000)) + sqrt(BigFloat(n)) * log(BigFloat(q_prev))) / sqrt(BigFloat(n + 1));
    return BigInt(floor(exp(log_q)));
}

std::size_t bit_length(const BigInt& v) { return v == 0 ? 0 : msb(v) + 1; }

}  // namespace

LiouvilleSchedule liouville_alpha(const std::vector<double>& gammas, int q_min, const LiouvilleOptions& options) {
    if (gammas.empty()) throw Error(ErrorCode::InvalidArgument, "at least one stage exponent is required");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (gammas[i] < 2.0) throw Error(ErrorCode::InvalidArgument, "stage exponents must be >= 2");
        if (i > 0 && gammas[i] < gammas[i - 1]) {
            throw Error(ErrorCode::InvalidArgument, "stage exponents must be nondecreasing");
        }
    }
    if (q_min < 2) throw Error(ErrorCode::InvalidArgument, "q_min must be >= 2");

    LiouvilleSchedule schedule;
    schedule.growth_enforced = options.enforce_growth;

    if (options.seed) {
        // Stages must already be present in the seed's expansion.
        const RotationNumber& seed = *options.seed;
        int next_index = 0;
        for (std::size_t n = 0; n < gammas.size(); ++n) {
            bool found = false;
            for (int k = next_index; k < seed.depth(); ++k) {
                const Convergent& c = seed.convergents[k];
                if (c.q < q_min) continue;
                if (!approximation_inequality_holds(seed.alpha, c.p, c.q, gammas[n])) continue;
                if (options.enforce_growth && !schedule.stages.empty() &&
                    !growth_condition_holds(schedule.stages.back().q, c.q, static_cast<int>(n) + 1)) {
                    continue;
                }
                schedule.stages.push_back({static_cast<int>(n) + 1, k + 1, c.p, c.q, gammas[n]});
                next_index = k + 1;
                found = true;
                break;
            }
            if (!found) {
                throw Error(ErrorCode::StageInfeasible,
                            "no convergent of the seed satisfies |q alpha - p| < 1/(16 q^" +
                                std::to_string(gammas[n]) + ") at stage " + std::to_string(n + 1));
            }
        }
        schedule.alpha = seed;
        return schedule;
    }

    const unsigned bits = options.precision_bits;
    std::vector<BigInt> quotients{BigInt(q_min)};
    BigInt q_prev = 1;  // q_0
    BigInt q = q_min;   // q_1
    std::size_t completed = 0;
    for (std::size_t n = 1; n <= gammas.size(); ++n) {
        // Choose a_{n+1}: q_{n+1} >= 16 q_n^{gamma_n} certifies stage n for any tail.
        BigInt a = std::max(BigInt(1), ceil_div_positive(approximation_bound(q, gammas[n - 1], bits) - q_prev, q));
        if (options.enforce_growth && n < gammas.size()) {
            a = std::max(a, ceil_div_positive(growth_bound(q, static_cast<int>(n) + 1) - q_prev, q));
            while (!growth_condition_holds(q, a * q + q_prev, static_cast<int>(n) + 1)) ++a;
        }
        const BigInt q_next = a * q + q_prev;
        // The enclosure must resolve q_{n+1} comfortably to certify stage n.
        if (2 * bit_length(q_next) + 64 > bits) {
            schedule.truncated = true;
            schedule.notice = "precision of " + std::to_string(bits) + " bits exhausted before stage " +
                              std::to_string(n) + "; schedule truncated to " + std::to_string(completed) +
                              " stage(s)";
            break;
        }
        quotients.push_back(a);
        q_prev = q;
        q = q_next;
        completed = n;
    }
    if (completed == 0) {
        throw Error(ErrorCode::StageInfeasible, "precision too small to certify the first stage");
    }

    std::string expression = "cf_golden(";
    for (std::size_t i = 0; i < quotients.size(); ++i) {
        expression += (i ? "," : "") + quotients[i].str();
    }
    expression += ")";
    const RealEnclosure alpha = parse_alpha(expression, bits);
    // The golden tail contributes further quotients; keep the scheduled ones plus a few.
    schedule.alpha = continued_fraction(alpha, static_cast<int>(quotients.size()) + 4);
    for (std::size_t i = 0; i < quotients.size(); ++i) {
        if (schedule.alpha.partial_quotients[i] != quotients[i]) {
            throw Error(ErrorCode::ConstructionFailed, "re-expansion disagrees with the constructed quotients");
        }
    }
    for (std::size_t n = 1; n <= completed; ++n) {
        const Convergent& c = schedule.alpha.convergents[n - 1];
        if (!approximation_inequality_holds(alpha, c.p, c.q, gammas[n - 1])) {
            throw Error(ErrorCode::ConstructionFailed, "stage " + std::to_string(n) + " inequality failed to verify");
        }
        schedule.stages.push_back({static_cast<int>(n), static_cast<int>(n), c.p, c.q, gammas[n - 1]});
    }
    return schedule;
}

}  // namespace evp
