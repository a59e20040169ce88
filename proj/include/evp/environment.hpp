#pragma once

// The circle environment (alpha, p), its symmetry class, the Markov operator T
// and the invariant density.

#include "evp/arithmetic.hpp"
#include "evp/cohomology.hpp"
#include "evp/periodic.hpp"

#include <optional>
#include <string>

namespace evp {

enum class Symmetry { Symmetric, Asymmetric };

std::string to_string(Symmetry s);

inline constexpr double kSymmetryThreshold = 1e-10;
inline constexpr double kDegeneracyMargin = 1e-8;

struct Environment {
    double alpha = 0.0;
    std::optional<RotationNumber> rotation;  // certified description of alpha when known
    PeriodicFunction p;
    PeriodicFunction q;  // 1 - p
    /// Exact log(p/q) when the environment was built from log-odds; p is then
    /// its truncated logistic transform.
    std::optional<PeriodicFunction> log_odds;
    double epsilon_margin = 0.0;
    Symmetry symmetry = Symmetry::Symmetric;
    double lambda = 1.0;
    double log_lambda = 0.0;
    int k_target = kDefaultKTarget;
};

Environment classify(double alpha, const PeriodicFunction& p, int k_target = kDefaultKTarget);
Environment classify(const RotationNumber& alpha, const PeriodicFunction& p, int k_target = kDefaultKTarget);
/// p = 1/(1 + e^{-l}); lambda = exp(mean l) exactly.
Environment classify_log_odds(double alpha, const PeriodicFunction& log_odds, int k_target = kDefaultKTarget);

/// (alpha, q(-x)); the walk seen through x -> -x. lambda becomes 1/lambda.
Environment mirror(const Environment& env);

/// T f(x) = p(x) f(x+alpha) + q(x) f(x-alpha), exact of degree K_p + K_f.
PeriodicFunction apply_T(const Environment& env, const PeriodicFunction& f);

enum class DensityConstruction { SymmetricGOverQ, AsymmetricEtaGOverP };

std::string to_string(DensityConstruction c);

struct InvariantDensity {
    PeriodicFunction rho;  // mean 1
    DensityConstruction construction = DensityConstruction::SymmetricGOverQ;
    double stationarity_residual = 0.0;
    /// rho = g * w / normalization (symmetric) or eta * g * w / normalization
    /// (asymmetric), where w is the truncated 1/q or 1/p. log g has mean 0.
    PeriodicFunction g;
    std::optional<PeriodicFunction> eta;
    PeriodicFunction inverse_weight;
    double normalization = 1.0;
    bool mirrored = false;
    double truncation_tail = 0.0;
    double symmetric_defect = 0.0;  // sup |p/q - g(.+alpha)/g|, symmetric branch
};

/// sup over the default grid of |p(x-a) rho(x-a) + q(x+a) rho(x+a) - rho(x)|.
double stationarity_residual(const Environment& env, const PeriodicFunction& rho);

InvariantDensity invariant_density(const Environment& env, double tol = 1e-9);

/// log(p/q): the stored log-odds or the truncated grid logarithm.
PeriodicFunction log_ratio(const Environment& env);

}  // namespace evp
