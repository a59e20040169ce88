#include "evp/environment.hpp"

#include "evp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evp {

std::string to_string(Symmetry s) { return s == Symmetry::Symmetric ? "symmetric" : "asymmetric"; }

std::string to_string(DensityConstruction c) {
    return c == DensityConstruction::SymmetricGOverQ ? "symmetric_g_over_q" : "asymmetric_eta_g_over_p";
}

namespace {

Environment finish(Environment env) {
    env.q = 1.0 - env.p;
    const double lo = env.p.grid_min();
    const double hi = env.p.grid_max();
    env.epsilon_margin = std::min(lo, 1.0 - hi);
    if (env.epsilon_margin < kDegeneracyMargin) {
        std::ostringstream msg;
        msg << "p ranges over [" << lo << ", " << hi << "] and touches {0, 1}";
        throw Error(ErrorCode::DegenerateEnvironment, msg.str());
    }
    if (!env.log_odds) {
        const Truncated l = log(env.p, env.k_target);
        const Truncated m = log(env.q, env.k_target);
        env.log_lambda = l.function.mean() - m.function.mean();
    } else {
        env.log_lambda = env.log_odds->mean();
    }
    env.lambda = std::exp(env.log_lambda);
    env.symmetry = std::abs(env.log_lambda) <= kSymmetryThreshold ? Symmetry::Symmetric : Symmetry::Asymmetric;
    return env;
}

double reduce(double alpha) {
    const double a = alpha - std::floor(alpha);
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must not be an integer");
    return a;
}

}  // namespace

Environment classify(double alpha, const PeriodicFunction& p, int k_target) {
    Environment env;
    env.alpha = reduce(alpha);
    env.p = p;
    env.k_target = k_target;
    return finish(std::move(env));
}

Environment classify(const RotationNumber& alpha, const PeriodicFunction& p, int k_target) {
    Environment env = classify(alpha.value(), p, k_target);
    env.rotation = alpha;
    return env;
}

Environment classify_log_odds(double alpha, const PeriodicFunction& log_odds, int k_target) {
    Environment env;
    env.alpha = reduce(alpha);
    env.k_target = k_target;
    env.log_odds = log_odds;
    env.p = logistic(log_odds, k_target).function;
    return finish(std::move(env));
}

Environment mirror(const Environment& env) {
    Environment out = env;
    out.p = env.q.reflected();
    out.q = env.p.reflected();
    if (env.log_odds) out.log_odds = -env.log_odds->reflected();
    out.log_lambda = -env.log_lambda;
    out.lambda = 1.0 / env.lambda;
    return out;
}

PeriodicFunction apply_T(const Environment& env, const PeriodicFunction& f) {
    return env.p * f.shifted(env.alpha) + env.q * f.shifted(-env.alpha);
}

PeriodicFunction log_ratio(const Environment& env) {
    if (env.log_odds) return *env.log_odds;
    return log(env.p, env.k_target).function - log(env.q, env.k_target).function;
}

double stationarity_residual(const Environment& env, const PeriodicFunction& rho) {
    const PeriodicFunction defect = (env.p * rho).shifted(-env.alpha) + (env.q * rho).shifted(env.alpha) - rho;
    return defect.grid_sup();
}

namespace {

SolveReport rotation_solve(const Environment& env, const PeriodicFunction& rhs) {
    CohomologyOptions options;
    options.zero_mean_tol = std::numeric_limits<double>::infinity();
    if (env.rotation) return solve_rotation(rhs - rhs.mean(), *env.rotation, options);
    return solve_rotation(rhs - rhs.mean(), env.alpha, options);
}

InvariantDensity symmetric_density(const Environment& env) {
    const PeriodicFunction l = log_ratio(env);
    const PeriodicFunction h = rotation_solve(env, l).solution;
    const Truncated g = exp(h, env.k_target);
    const Truncated inv_q = reciprocal(env.q, env.k_target);
    const PeriodicFunction weight = g.function * inv_q.function;
    InvariantDensity d;
    d.construction = DensityConstruction::SymmetricGOverQ;
    d.g = g.function;
    d.inverse_weight = inv_q.function;
    d.normalization = weight.mean();
    d.rho = weight * (1.0 / d.normalization);
    d.truncation_tail = g.tail + inv_q.tail;

    const std::vector<double>& gv = d.g.grid();
    const std::vector<double> gs = d.g.shifted(env.alpha).sample(gv.size());
    const std::vector<double> pv = env.p.sample(gv.size());
    double defect = 0.0;
    for (std::size_t i = 0; i < gv.size(); ++i) {
        defect = std::max(defect, std::abs(pv[i] / (1.0 - pv[i]) - gs[i] / gv[i]));
    }
    d.symmetric_defect = defect;
    return d;
}

InvariantDensity asymmetric_density(const Environment& env) {
    const PeriodicFunction l = log_ratio(env);
    // h(x) - h(x - alpha) = l(x) - log lambda
    const PeriodicFunction h = rotation_solve(env, l.shifted(env.alpha) - env.log_lambda).solution;
    const Truncated g = exp(h, env.k_target);
    CohomologyOptions options;
    options.cross_check = false;
    const PeriodicFunction eta = solve_eta(g.function, env.alpha, env.lambda, options, env.k_target).solution;
    const Truncated inv_p = reciprocal(env.p, env.k_target);
    const PeriodicFunction unnormalized = eta * g.function * inv_p.function;
    const double z = unnormalized.mean();
    InvariantDensity d;
    d.construction = DensityConstruction::AsymmetricEtaGOverP;
    d.g = g.function;
    d.eta = eta;
    d.inverse_weight = inv_p.function;
    d.normalization = z;
    d.rho = unnormalized * (1.0 / z);
    d.truncation_tail = g.tail + inv_p.tail;
    return d;
}

InvariantDensity reflect(InvariantDensity d) {
    d.rho = d.rho.reflected();
    d.g = d.g.reflected();
    if (d.eta) d.eta = d.eta->reflected();
    d.inverse_weight = d.inverse_weight.reflected();
    d.mirrored = true;
    return d;
}

}  // namespace

InvariantDensity invariant_density(const Environment& env, double tol) {
    InvariantDensity d;
    if (env.symmetry == Symmetry::Symmetric) {
        d = symmetric_density(env);
    } else if (env.lambda > 1.0) {
        d = asymmetric_density(env);
    } else {
        d = reflect(asymmetric_density(mirror(env)));
    }
    d.stationarity_residual = stationarity_residual(env, d.rho);
    if (!(d.stationarity_residual < tol)) {
        std::ostringstream msg;
        msg << "stationarity residual " << d.stationarity_residual << " exceeds tolerance " << tol;
        throw Error(ErrorCode::ConstructionFailed, msg.str());
    }
    if (d.rho.grid_min() <= 0.0) {
        throw Error(ErrorCode::ConstructionFailed, "density is not positive on the grid");
    }
    return d;
}

}  // namespace evp
