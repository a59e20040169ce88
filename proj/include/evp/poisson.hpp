#pragma once

// T phi - phi = psi for centered psi, and the martingale CLT variance.

#include "evp/environment.hpp"

#include <optional>
#include <vector>

namespace evp {

enum class Branch { Symmetric, Asymmetric };

std::string to_string(Branch b);

struct PoissonCertificate {
    PeriodicFunction phi;
    PeriodicFunction psi;  // centered input
    Branch branch = Branch::Symmetric;
    PeriodicFunction g;
    std::optional<PeriodicFunction> eta;    // symmetric branch
    std::optional<PeriodicFunction> kappa;  // asymmetric branch
    double residual_sup = 0.0;
    double norm_ratio = 0.0;
    double centering = 0.0;  // mean(rho psi) of the input
    int level = 1;
    bool mirrored = false;
};

struct PoissonOptions {
    double tolerance = 1e-9;
    double centering_tol = 1e-10;
    int r = 0;
    int m0 = 2;
};

/// psi_raw - mean(rho psi_raw)
PeriodicFunction center(const PeriodicFunction& rho, const PeriodicFunction& psi_raw);

PoissonCertificate solve_poisson(const Environment& env, const InvariantDensity& density, const PeriodicFunction& psi,
                                 const PoissonOptions& options = {});

/// Level j+1 solves (T - I) phi_{j+1} = phi_j - mean(rho phi_j), so that
/// (T - I)^j phi_j = psi for centered psi.
std::vector<PoissonCertificate> solve_poisson_iterated(const Environment& env, const InvariantDensity& density,
                                                       const PeriodicFunction& psi, int depth,
                                                       const PoissonOptions& options = {});

/// integral rho [p (T phi - phi(.+a))^2 + q (T phi - phi(.-a))^2]
double clt_variance(const Environment& env, const PeriodicFunction& rho, const PeriodicFunction& phi);

}  // namespace evp
