#include "evp/cohomology.hpp"

#include "evp/errors.hpp"

#include <cmath>
#include <sstream>

namespace evp {

namespace {

double norm_ratio(const PeriodicFunction& solution, const PeriodicFunction& rhs, const CohomologyOptions& options) {
    const double denominator = rhs.cr_norm_upper(options.r + options.m0);
    if (denominator == 0.0) return 0.0;
    return solution.cr_norm_upper(options.r) / denominator;
}

double sup_on_grid(const PeriodicFunction& f) { return f.grid_sup(); }

double damping_series_terms(double lambda) {
    return std::ceil(std::log(1e14) / std::log(lambda)) + 1.0;
}

void require_damped(double lambda) {
    if (!(lambda > 1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " is not > 1; mirror the environment first";
        throw Error(ErrorCode::NotDamped, msg.str());
    }
}

}  // namespace

std::vector<double> rotation_phases(double alpha, int K) {
    std::vector<double> out(K + 1);
    const double a = alpha - std::floor(alpha);
    for (int k = 0; k <= K; ++k) {
        const double t = static_cast<double>(k) * a;
        out[k] = t - std::floor(t);
    }
    return out;
}

std::vector<double> rotation_phases(const RotationNumber& alpha, int K) {
    PrecisionScope scope(alpha.alpha.precision_bits);
    const BigFloat a = alpha.alpha.value();
    std::vector<double> out(K + 1);
    for (int k = 0; k <= K; ++k) {
        BigFloat t = a * k;
        t -= floor(t);
        out[k] = static_cast<double>(t);
    }
    return out;
}

SolveReport solve_rotation_phases(const PeriodicFunction& psi, double alpha, const std::vector<double>& phases,
                                  const CohomologyOptions& options) {
    const int K = psi.degree();
    if (std::abs(psi.mean()) > options.zero_mean_tol) {
        std::ostringstream msg;
        msg << "right side has mean " << psi.mean() << " beyond tolerance " << options.zero_mean_tol;
        throw Error(ErrorCode::MeanObstruction, msg.str());
    }
    SolveReport report;
    std::vector<Complex> c(2 * K + 1, Complex(0.0, 0.0));
    for (int k = 1; k <= K; ++k) {
        const Complex denominator = unit_phase(phases.at(k)) - 1.0;
        const double size = std::abs(denominator);
        if (size < report.smallest_denominator) {
            report.smallest_denominator = size;
            report.denominator_index = k;
        }
        if (size < kResonanceCutoff) {
            std::ostringstream msg;
            msg << "|e^{2 pi i k alpha} - 1| = " << size << " at k = " << k;
            throw Error(ErrorCode::Resonance, msg.str());
        }
        c[K + k] = psi.coefficient(k) / denominator;
        c[K - k] = std::conj(c[K + k]);
    }
    report.solution = PeriodicFunction::hermitian_part(std::move(c));
    const PeriodicFunction defect = report.solution.shifted(alpha) - report.solution - psi;
    report.residual_sup = sup_on_grid(defect);
    report.norm_ratio = norm_ratio(report.solution, psi, options);
    return report;
}

SolveReport solve_rotation(const PeriodicFunction& psi, double alpha, const CohomologyOptions& options) {
    return solve_rotation_phases(psi, alpha, rotation_phases(alpha, psi.degree()), options);
}

SolveReport solve_rotation(const PeriodicFunction& psi, const RotationNumber& alpha, const CohomologyOptions& options) {
    return solve_rotation_phases(psi, alpha.value(), rotation_phases(alpha, psi.degree()), options);
}

SolveReport solve_damped(const PeriodicFunction& F, double alpha, double lambda, const CohomologyOptions& options) {
    require_damped(lambda);
    const int K = F.degree();
    const std::vector<double> phases = rotation_phases(alpha, K);
    SolveReport report;
    std::vector<Complex> c(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        const double phase = k >= 0 ? -phases[k] : phases[-k];
        const Complex denominator = lambda - unit_phase(phase);
        const double size = std::abs(denominator);
        if (size < report.smallest_denominator) {
            report.smallest_denominator = size;
            report.denominator_index = k;
        }
        c[K + k] = F.coefficient(k) / denominator;
    }
    report.solution = PeriodicFunction::hermitian_part(std::move(c));
    const PeriodicFunction defect = lambda * report.solution - report.solution.shifted(-alpha) - F;
    report.residual_sup = sup_on_grid(defect);
    report.norm_ratio = norm_ratio(report.solution, F, options);

    if (options.cross_check) {
        // kappa(x) = sum_{j>=0} lambda^{-(j+1)} F(x - j alpha), evaluated pointwise.
        const int terms = static_cast<int>(damping_series_terms(lambda));
        double worst = 0.0;
        for (int i = 0; i < options.check_points; ++i) {
            const double x = static_cast<double>(i) / options.check_points;
            double sum = 0.0;
            double weight = 1.0 / lambda;
            for (int j = 0; j < terms; ++j) {
                sum += weight * F.evaluate(x - j * alpha);
                weight /= lambda;
            }
            worst = std::max(worst, std::abs(sum - report.solution.evaluate(x)));
        }
        report.series_discrepancy = worst;
    }
    return report;
}

SolveReport solve_eta(const PeriodicFunction& g, double alpha, double lambda, const CohomologyOptions& options,
                      int k_target) {
    require_damped(lambda);
    const PeriodicFunction h = reciprocal(g, k_target).function;
    const int K = h.degree();
    const std::vector<double> phases = rotation_phases(alpha, K);
    SolveReport report;
    std::vector<Complex> c(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        const double phase = k >= 0 ? phases[k] : -phases[-k];
        const Complex denominator = unit_phase(phase) / lambda - 1.0;
        const double size = std::abs(denominator);
        if (size < report.smallest_denominator) {
            report.smallest_denominator = size;
            report.denominator_index = k;
        }
        c[K + k] = h.coefficient(k) / denominator;
    }
    report.solution = PeriodicFunction::hermitian_part(std::move(c));
    const PeriodicFunction defect = report.solution.shifted(alpha) * (1.0 / lambda) - report.solution - h;
    report.residual_sup = sup_on_grid(defect);
    report.norm_ratio = norm_ratio(report.solution, h, options);

    if (options.cross_check) {
        // eta(x) = -sum_{j>=0} lambda^{-j} / g(x + j alpha)
        const int terms = static_cast<int>(damping_series_terms(lambda));
        double worst = 0.0;
        for (int i = 0; i < options.check_points; ++i) {
            const double x = static_cast<double>(i) / options.check_points;
            double sum = 0.0;
            double weight = 1.0;
            for (int j = 0; j < terms; ++j) {
                sum -= weight / g.evaluate(x + j * alpha);
                weight /= lambda;
            }
            worst = std::max(worst, std::abs(sum - report.solution.evaluate(x)));
        }
        report.series_discrepancy = worst;
    }
    return report;
}

}  // namespace evp
