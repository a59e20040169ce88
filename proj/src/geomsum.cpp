#include "evp/geomsum.hpp"

#include "evp/errors.hpp"
#include "evp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace evp {

namespace {

/// Neumaier's compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            compensation_ += (sum_ - t) + v;
        } else {
            compensation_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

void check_stay(double s, double epsilon0) {
    if (!(s >= 0.0 && s < 1.0) || s < epsilon0 || s > 1.0 - epsilon0) {
        std::ostringstream msg;
        msg << "stay probability " << s << " outside [" << epsilon0 << ", " << 1.0 - epsilon0 << "] or not < 1";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
}

double binomial(int m, int i) {
    double v = 1.0;
    for (int k = 1; k <= i; ++k) v = v * (m - i + k) / k;
    return v;
}

}  // namespace

Segment Segment::from_stays(std::vector<double> stays, double endpoint) {
    Segment seg;
    seg.stays = std::move(stays);
    seg.endpoint = endpoint;
    for (double s : seg.stays) {
        check_stay(s, 0.0);
        seg.T_W += 1.0 / (1.0 - s);
        seg.sigma2_W += s / ((1.0 - s) * (1.0 - s));
    }
    return seg;
}

double GeomSumPmf::at(long j) const {
    if (j < j_min || j > j_max()) return 0.0;
    return probabilities[static_cast<std::size_t>(j - j_min)];
}

double GeomSumPmf::total() const {
    CompensatedSum sum;
    for (double p : probabilities) sum.add(p);
    return sum.value();
}

double GeomSumPmf::mean() const {
    CompensatedSum sum;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        sum.add(static_cast<double>(j_min + static_cast<long>(i)) * probabilities[i]);
    }
    return sum.value();
}

double GeomSumPmf::variance() const {
    const double mu = mean();
    CompensatedSum sum;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double d = static_cast<double>(j_min + static_cast<long>(i)) - mu;
        sum.add(d * d * probabilities[i]);
    }
    return sum.value();
}

GeomSumPmf add_geometric(const GeomSumPmf& f, double s, double tail_cut) {
    check_stay(s, 0.0);
    GeomSumPmf h;
    h.j_min = f.j_min + 1;
    h.tail_mass = f.tail_mass;
    const std::size_t base = f.probabilities.size();
    h.probabilities.reserve(base + 64);
    double previous = 0.0;
    for (std::size_t i = 0; i < base; ++i) {
        previous = s * previous + (1.0 - s) * f.probabilities[i];
        h.probabilities.push_back(previous);
    }
    if (s == 0.0) return h;
    const double ratio = s / (1.0 - s);
    // Beyond the support of f, h decays geometrically; its remainder past the
    // last stored entry is h_last * s / (1 - s).
    for (;;) {
        const double remainder = previous * ratio;
        if (tail_cut > 0.0 ? remainder < tail_cut : remainder < 1e-300) {
            h.tail_mass += remainder;
            break;
        }
        previous *= s;
        h.probabilities.push_back(previous);
    }
    return h;
}

GeomSumPmf geometric_pmf(double s, double epsilon0) {
    check_stay(s, epsilon0);
    GeomSumPmf point;
    point.j_min = 0;
    point.probabilities = {1.0};
    return add_geometric(point, s);
}

GeomSumPmf convolve_segment(const Segment& segment) {
    if (segment.stays.empty()) throw Error(ErrorCode::InvalidArgument, "segment must contain at least one site");
    GeomSumPmf pmf;
    pmf.j_min = 0;
    pmf.probabilities = {1.0};
    for (double s : segment.stays) pmf = add_geometric(pmf, s);
    return pmf;
}

GeomSumPmf iid_sum_pmf(double s, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    return convolve_segment(Segment::from_stays(std::vector<double>(static_cast<std::size_t>(n), s)));
}

DeltaTable delta_table(const GeomSumPmf& pmf, int n, int m) {
    if (m < 0 || m > kMaxDeltaOrder) {
        throw Error(ErrorCode::OrderTooHigh, "difference order " + std::to_string(m) + " is not supported (max " +
                                                 std::to_string(kMaxDeltaOrder) + ")");
    }
    DeltaTable table;
    table.n = n;
    table.m = m;
    table.j_min = n;
    const long top = pmf.j_max();
    std::vector<double> weights(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) weights[i] = ((m - i) % 2 == 0 ? 1.0 : -1.0) * binomial(m, i);
    for (long j = n; j <= top; ++j) {
        CompensatedSum sum;
        for (int i = 0; i <= m; ++i) sum.add(weights[i] * pmf.at(j + i));
        const double v = sum.value();
        table.values.push_back(v);
        table.sup = std::max(table.sup, std::abs(v));
    }
    table.scaled_sup = std::pow(static_cast<double>(n), 0.5 * (m + 1)) * table.sup;
    return table;
}

DeltaTable delta_table(double s, int n, int m) { return delta_table(iid_sum_pmf(s, n), n, m); }

std::vector<double> undo_difference(const std::vector<double>& differences) {
    std::vector<double> out(differences.size());
    CompensatedSum sum;
    for (std::size_t i = differences.size(); i-- > 0;) {
        sum.add(differences[i]);
        out[i] = -sum.value();
    }
    return out;
}

LltReport llt_error(const Segment& segment) {
    if (segment.length() < 8) throw Error(ErrorCode::PreconditionFailed, "segment length must be >= 8");
    if (!(segment.sigma2_W > 0.0)) throw Error(ErrorCode::PreconditionFailed, "segment variance is zero");
    const GeomSumPmf pmf = convolve_segment(segment);
    LltReport report;
    report.mean = segment.T_W;
    report.sigma = std::sqrt(segment.sigma2_W);
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * report.sigma);
    const long lo = std::min(pmf.j_min, static_cast<long>(std::floor(report.mean - 12.0 * report.sigma)));
    double worst = 0.0;
    for (long j = lo; j <= pmf.j_max(); ++j) {
        const double z = (static_cast<double>(j) - report.mean) / report.sigma;
        const double err = std::abs(pmf.at(j) - norm * std::exp(-0.5 * z * z));
        if (err > worst) {
            worst = err;
            report.worst_j = j;
        }
    }
    report.scaled_error = report.sigma * worst;
    return report;
}

int stopping_index(const std::vector<double>& p, int n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(p[k] > 0.0 && p[k] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "exit probabilities must lie in (0, 1]");
        sum += 1.0 / p[k];
        if (sum > 0.5 * n) return static_cast<int>(k) + 1;
    }
    throw Error(ErrorCode::InvalidArgument, "not enough parameters to reach the stopping level n/2");
}

double stopping_tail_exact(const std::vector<double>& p, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    if (n > kStoppingTailExactCap) {
        throw Error(ErrorCode::CapExceeded, "exact stopping tail is limited to n <= " +
                                                std::to_string(kStoppingTailExactCap) + "; use Monte Carlo");
    }
    const int tau = stopping_index(p, n);
    GeomSumPmf pmf;
    pmf.j_min = 0;
    pmf.probabilities = {1.0};
    for (int k = 0; k < tau; ++k) pmf = add_geometric(pmf, 1.0 - p[k], 0.0);
    const double centre = 0.5 * n;
    const double width = std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
    CompensatedSum sum;
    for (long j = pmf.j_min; j <= pmf.j_max(); ++j) {
        if (std::abs(static_cast<double>(j) - centre) > width) sum.add(pmf.at(j));
    }
    // Mass past the stored range lies above the window.
    if (static_cast<double>(pmf.j_max() + 1) - centre > width) sum.add(pmf.tail_mass);
    return std::min(1.0, sum.value());
}

TailEstimate stopping_tail_mc(const std::vector<double>& p, int n, std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be > 0");
    const int tau = stopping_index(p, n);
    const double centre = 0.5 * n;
    const double width = std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
    const std::size_t chunks = 64;
    std::vector<std::uint64_t> hits(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
        Philox rng(seed, c);
        const std::uint64_t begin = samples * c / chunks;
        const std::uint64_t end = samples * (c + 1) / chunks;
        for (std::uint64_t i = begin; i < end; ++i) {
            double total = 0.0;
            for (int k = 0; k < tau; ++k) {
                const double stay = 1.0 - p[k];
                total += stay == 0.0 ? 1.0 : 1.0 + std::floor(std::log(rng.uniform_open()) / std::log(stay));
            }
            if (std::abs(total - centre) > width) ++hits[c];
        }
    });
    std::uint64_t count = 0;
    for (std::uint64_t h : hits) count += h;
    TailEstimate est;
    est.samples = samples;
    est.seed = seed;
    const double nn = static_cast<double>(samples);
    const double phat = static_cast<double>(count) / nn;
    const double z = 1.959963984540054;
    const double denom = 1.0 + z * z / nn;
    const double centre_w = (phat + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
    est.probability = phat;
    est.ci_low = std::max(0.0, centre_w - half);
    est.ci_high = std::min(1.0, centre_w + half);
    return est;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

TailFit fit_stopping_tail(const std::vector<int>& ns, const std::vector<double>& probabilities) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(probabilities.at(i) > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "tail probability is zero at n = " + std::to_string(ns[i]));
        }
        const double l = std::log(static_cast<double>(ns[i]));
        xs.push_back(l * l);
        ys.push_back(std::log(probabilities[i]));
    }
    const LineFit line = fit_line(xs, ys);
    return {-line.slope, line.intercept, line.r2};
}

CharModulus char_modulus_diagnostic(const std::vector<double>& p, const std::vector<double>& t_grid, double delta_hat) {
    if (p.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one parameter");
    CharModulus out;
    out.delta_hat = delta_hat;
    out.kappa_hat = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(p.size());
    for (double t : t_grid) {
        double log_mod = 0.0;
        for (double pj : p) {
            const double qj = 1.0 - pj;
            log_mod += std::log(pj) - 0.5 * std::log(1.0 - 2.0 * qj * std::cos(t) + qj * qj);
        }
        out.t.push_back(t);
        out.modulus.push_back(std::exp(log_mod));
        const double at = std::abs(t);
        if (at > 0.0 && at <= delta_hat) out.kappa_hat = std::min(out.kappa_hat, -log_mod / (n * t * t));
        if (at >= delta_hat && at <= std::numbers::pi + 1e-12) out.plateau = std::max(out.plateau, std::exp(log_mod / n));
    }
    if (!std::isfinite(out.kappa_hat)) out.kappa_hat = 0.0;
    return out;
}

}  // namespace evp
