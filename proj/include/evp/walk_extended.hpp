#pragma once

// Mixing gaps below double resolution: the exact lattice recursion and the
// stationary mean are carried in MPFR. Requires an environment built from
// log-odds, so that p is known exactly at every orbit point.

#include "evp/environment.hpp"
#include "evp/walk.hpp"

#include <vector>

namespace evp {

inline constexpr unsigned kExtendedBits = 320;

struct ExtendedOptions {
    unsigned precision_bits = kExtendedBits;
    int quadrature_points = 1024;
};

/// nu(psi) = integral rho psi, with rho evaluated from the log-odds at
/// `quadrature_points` nodes (trapezoid rule; spectrally accurate here).
/// Returned as a decimal string to keep full precision plus a double.
struct ExtendedValue {
    std::string decimal;
    double value = 0.0;
};

ExtendedValue stationary_mean_extended(const Environment& env, const PeriodicFunction& psi,
                                       const ExtendedOptions& options = {});

/// Exact gaps E_x psi(X_n) - nu(psi) at the requested steps, computed in MPFR
/// and rounded to double at the end.
MixingCurve mixing_curve_extended(const Environment& env, double x, const PeriodicFunction& psi,
                                  const std::vector<int>& ns,
                                  std::optional<std::pair<int, int>> window = std::nullopt,
                                  const ExtendedOptions& options = {}, int cap = kDefaultStepCap);

/// One curve per start, computed in parallel; nu is shared.
std::vector<MixingCurve> mixing_curves_extended(const Environment& env, const std::vector<double>& starts,
                                                const PeriodicFunction& psi, const std::vector<int>& ns,
                                                std::optional<std::pair<int, int>> window = std::nullopt,
                                                const ExtendedOptions& options = {}, int cap = kDefaultStepCap,
                                                unsigned threads = 0);

}  // namespace evp
