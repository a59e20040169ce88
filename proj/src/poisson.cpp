#include "evp/poisson.hpp"

#include "evp/errors.hpp"

#include <cmath>
#include <sstream>

namespace evp {

std::string to_string(Branch b) { return b == Branch::Symmetric ? "symmetric" : "asymmetric"; }

PeriodicFunction center(const PeriodicFunction& rho, const PeriodicFunction& psi_raw) {
    return psi_raw - pairing(rho, psi_raw);
}

namespace {

SolveReport rotation(const Environment& env, const PeriodicFunction& rhs, double zero_mean_tol) {
    CohomologyOptions options;
    options.zero_mean_tol = zero_mean_tol;
    if (env.rotation) return solve_rotation(rhs, *env.rotation, options);
    return solve_rotation(rhs, env.alpha, options);
}

PoissonCertificate symmetric_branch(const Environment& env, const InvariantDensity& d, const PeriodicFunction& psi) {
    PoissonCertificate cert;
    cert.branch = Branch::Symmetric;
    cert.g = d.g;
    // f(x+a) - f(x) = g psi / q
    const PeriodicFunction rhs = d.g * d.inverse_weight * psi;
    PeriodicFunction f = rotation(env, rhs - rhs.mean(), 1e-12).solution;
    const PeriodicFunction inv_g = reciprocal(d.g, env.k_target).function;
    // eta = f/g is fixed up to c/g; pick c so that eta has mean zero.
    const double c = -pairing(f, inv_g) / inv_g.mean();
    f = f + c;
    PeriodicFunction eta = f * inv_g;
    eta = eta - eta.mean();
    cert.eta = eta;
    // phi(x) - phi(x-a) = eta(x)
    cert.phi = rotation(env, eta.shifted(env.alpha), 1e-9).solution;
    return cert;
}

PoissonCertificate asymmetric_branch(const Environment& env, const InvariantDensity& d, const PeriodicFunction& psi) {
    PoissonCertificate cert;
    cert.branch = Branch::Asymmetric;
    cert.g = d.g;
    CohomologyOptions options;
    options.cross_check = false;
    const PeriodicFunction kappa =
        solve_damped(env.lambda * d.g * psi * d.inverse_weight, env.alpha, env.lambda, options).solution;
    cert.kappa = kappa;
    const PeriodicFunction ratio = kappa * reciprocal(d.g, env.k_target).function;
    if (std::abs(ratio.mean()) > 1e-9) {
        std::ostringstream msg;
        msg << "mean(kappa/g) = " << ratio.mean() << "; psi is not centered against rho";
        throw Error(ErrorCode::CenteringViolation, msg.str());
    }
    cert.phi = rotation(env, ratio - ratio.mean(), 1e-9).solution;
    return cert;
}

InvariantDensity reflected(const InvariantDensity& d) {
    InvariantDensity out = d;
    out.rho = d.rho.reflected();
    out.g = d.g.reflected();
    if (d.eta) out.eta = d.eta->reflected();
    out.inverse_weight = d.inverse_weight.reflected();
    out.mirrored = !d.mirrored;
    return out;
}

}  // namespace

PoissonCertificate solve_poisson(const Environment& env, const InvariantDensity& density, const PeriodicFunction& psi,
                                 const PoissonOptions& options) {
    const double centering = pairing(density.rho, psi);
    if (std::abs(centering) > options.centering_tol) {
        std::ostringstream msg;
        msg << "mean(rho psi) = " << centering << " exceeds " << options.centering_tol;
        throw Error(ErrorCode::CenteringViolation, msg.str());
    }
    PoissonCertificate cert;
    if (env.symmetry == Symmetry::Symmetric) {
        cert = symmetric_branch(env, density, psi);
    } else if (env.lambda > 1.0) {
        cert = asymmetric_branch(env, density, psi);
    } else {
        // Solve for the reflected walk and reflect back.
        PoissonCertificate m = asymmetric_branch(mirror(env), reflected(density), psi.reflected());
        cert.branch = Branch::Asymmetric;
        cert.phi = m.phi.reflected();
        cert.g = m.g.reflected();
        cert.kappa = m.kappa->reflected();
        cert.mirrored = true;
    }
    cert.psi = psi;
    cert.centering = centering;
    const PeriodicFunction defect = apply_T(env, cert.phi) - cert.phi - psi;
    cert.residual_sup = defect.grid_sup();
    const double denominator = psi.cr_norm_upper(options.r + 2 * options.m0);
    cert.norm_ratio = denominator == 0.0 ? 0.0 : cert.phi.cr_norm_upper(options.r) / denominator;
    if (!(cert.residual_sup < options.tolerance)) {
        std::ostringstream msg;
        msg << "Poisson residual " << cert.residual_sup << " exceeds " << options.tolerance;
        throw Error(ErrorCode::ResidualTooLarge, msg.str());
    }
    return cert;
}

std::vector<PoissonCertificate> solve_poisson_iterated(const Environment& env, const InvariantDensity& density,
                                                       const PeriodicFunction& psi, int depth,
                                                       const PoissonOptions& options) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
    std::vector<PoissonCertificate> levels;
    PeriodicFunction rhs = psi;
    for (int level = 1; level <= depth; ++level) {
        PoissonCertificate cert = solve_poisson(env, density, rhs, options);
        cert.level = level;
        rhs = center(density.rho, cert.phi);
        levels.push_back(std::move(cert));
    }
    return levels;
}

double clt_variance(const Environment& env, const PeriodicFunction& rho, const PeriodicFunction& phi) {
    const PeriodicFunction t_phi = apply_T(env, phi);
    const PeriodicFunction up = t_phi - phi.shifted(env.alpha);
    const PeriodicFunction down = t_phi - phi.shifted(-env.alpha);
    const PeriodicFunction integrand = env.p * up * up + env.q * down * down;
    return std::max(0.0, pairing(rho, integrand));
}

}  // namespace evp
