#pragma once

// Fourier solvers for phi(x+a) - phi(x) = psi, lambda k(x) - k(x-a) = F and
// lambda^{-1} eta(x+a) - eta(x) = 1/g.

#include "evp/arithmetic.hpp"
#include "evp/periodic.hpp"

#include <limits>

namespace evp {

inline constexpr double kResonanceCutoff = 1e-14;

struct SolveReport {
    PeriodicFunction solution;
    double residual_sup = 0.0;
    double smallest_denominator = std::numeric_limits<double>::infinity();
    int denominator_index = 0;
    double norm_ratio = 0.0;  // |solution|_{C^r} / |rhs|_{C^{r+m0}}, coefficient bounds
    /// Sup distance between the spectral solution and the independent series
    /// construction; NaN when the cross-check was not run.
    double series_discrepancy = std::numeric_limits<double>::quiet_NaN();
};

struct CohomologyOptions {
    double zero_mean_tol = 1e-12;
    int r = 0;
    int m0 = 2;
    bool cross_check = true;
    int check_points = 128;
};

/// Fractional parts of k*alpha for k = 0..K.
std::vector<double> rotation_phases(double alpha, int K);
/// As above with k*alpha evaluated at the enclosure's precision.
std::vector<double> rotation_phases(const RotationNumber& alpha, int K);

SolveReport solve_rotation(const PeriodicFunction& psi, double alpha, const CohomologyOptions& options = {});
SolveReport solve_rotation(const PeriodicFunction& psi, const RotationNumber& alpha,
                           const CohomologyOptions& options = {});
/// Same equation with precomputed phases frac(k alpha), k = 0..deg(psi).
SolveReport solve_rotation_phases(const PeriodicFunction& psi, double alpha, const std::vector<double>& phases,
                                  const CohomologyOptions& options);

SolveReport solve_damped(const PeriodicFunction& F, double alpha, double lambda,
                         const CohomologyOptions& options = {});

/// Solves with right side 1/g, where 1/g is truncated at k_target.
SolveReport solve_eta(const PeriodicFunction& g, double alpha, double lambda, const CohomologyOptions& options = {},
                      int k_target = kDefaultKTarget);

}  // namespace evp
