#include "evp/walk.hpp"

#include "evp/errors.hpp"
#include "evp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace evp {

namespace {

double circle_point(double x, double alpha, int m) {
    const double y = x + static_cast<double>(m) * alpha;
    return y - std::floor(y);
}

void check_cap(int n, int cap) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "step count must be >= 0");
    if (n > cap) {
        throw Error(ErrorCode::CapExceeded,
                    "n = " + std::to_string(n) + " exceeds the exact step cap " + std::to_string(cap));
    }
}

void check_mass(double sum, int n) {
    const double drift = std::abs(sum - 1.0);
    const double allowance = 1e-12 * std::max(1.0, n / 1e4);
    if (drift > allowance) {
        std::ostringstream msg;
        msg << "total mass drifted by " << drift << " after " << n << " steps";
        throw Error(ErrorCode::ResidualTooLarge, msg.str());
    }
}

double orbit_sum(const std::vector<double>& d, const std::vector<double>& values, int radius_d, int radius_v, int step) {
    double sum = 0.0;
    for (int m = -radius_d; m <= radius_d; m += step) {
        sum += d[static_cast<std::size_t>(m + radius_d)] * values[static_cast<std::size_t>(m + radius_v)];
    }
    return sum;
}

}  // namespace

LazyEnvironment make_lazy(const Environment& env, const PeriodicFunction& stay, double epsilon0) {
    const double lo = stay.grid_min();
    const double hi = stay.grid_max();
    if (epsilon0 < 0.0) epsilon0 = std::max(0.0, std::min(lo, 1.0 - hi));
    if (lo < epsilon0 - 1e-12 || hi > 1.0 - epsilon0 + 1e-12 || hi >= 1.0) {
        std::ostringstream msg;
        msg << "stay probability ranges over [" << lo << ", " << hi << "], outside [" << epsilon0 << ", "
            << 1.0 - epsilon0 << "]";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    LazyEnvironment lazy;
    lazy.alpha = env.alpha;
    lazy.stay = stay;
    lazy.plus = (1.0 - stay) * env.p;
    lazy.minus = (1.0 - stay) * env.q;
    lazy.epsilon0 = epsilon0;
    const PeriodicFunction total = lazy.stay + lazy.plus + lazy.minus - 1.0;
    if (total.grid_sup() > 1e-12) throw Error(ErrorCode::InvalidArgument, "lazy transition probabilities do not sum to 1");
    return lazy;
}

double TransitionTable::point(int m) const { return circle_point(x, alpha, m); }

std::vector<double> orbit_values(const PeriodicFunction& f, double x, double alpha, int radius) {
    std::vector<double> out(2 * static_cast<std::size_t>(radius) + 1);
    for (int m = -radius; m <= radius; ++m) out[m + radius] = f.evaluate(circle_point(x, alpha, m));
    return out;
}

TransitionTable transition_table(const Environment& env, double x, int radius) {
    TransitionTable table;
    table.x = x;
    table.alpha = env.alpha;
    table.radius = radius;
    table.plus = orbit_values(env.p, x, env.alpha, radius);
    table.minus.resize(table.plus.size());
    for (std::size_t i = 0; i < table.plus.size(); ++i) table.minus[i] = 1.0 - table.plus[i];
    return table;
}

TransitionTable transition_table(const LazyEnvironment& env, double x, int radius) {
    TransitionTable table;
    table.x = x;
    table.alpha = env.alpha;
    table.radius = radius;
    table.lazy = true;
    table.stay = orbit_values(env.stay, x, env.alpha, radius);
    table.plus = orbit_values(env.plus, x, env.alpha, radius);
    table.minus = orbit_values(env.minus, x, env.alpha, radius);
    return table;
}

double LatticeDistribution::at(int m) const {
    const int r = radius();
    if (m < -r || m > r) return 0.0;
    return probabilities[static_cast<std::size_t>(m + r)];
}

LatticeDistribution point_mass(double x, double alpha, bool lazy) {
    LatticeDistribution d;
    d.x = x;
    d.alpha = alpha;
    d.lazy = lazy;
    d.probabilities = {1.0};
    return d;
}

LatticeDistribution evolve(const TransitionTable& table, const LatticeDistribution& start, int steps) {
    const int r0 = start.radius();
    if (r0 + steps > table.radius) throw Error(ErrorCode::InvalidArgument, "transition table is too small");
    std::vector<double> current = start.probabilities;
    int r = r0;
    for (int k = 0; k < steps; ++k) {
        std::vector<double> next(2 * static_cast<std::size_t>(r + 1) + 1, 0.0);
        for (int m = -(r + 1); m <= r + 1; ++m) {
            double v = 0.0;
            if (m - 1 >= -r && m - 1 <= r) v += table.plus[table.index(m - 1)] * current[m - 1 + r];
            if (m + 1 >= -r && m + 1 <= r) v += table.minus[table.index(m + 1)] * current[m + 1 + r];
            if (table.lazy && m >= -r && m <= r) v += table.stay[table.index(m)] * current[m + r];
            next[m + r + 1] = v;
        }
        current.swap(next);
        ++r;
    }
    LatticeDistribution out;
    out.x = start.x;
    out.alpha = start.alpha;
    out.n = start.n + steps;
    out.lazy = table.lazy;
    out.probabilities = std::move(current);
    const double sum = std::accumulate(out.probabilities.begin(), out.probabilities.end(), 0.0);
    out.mass_drift = std::abs(sum - 1.0);
    check_mass(sum, out.n);
    return out;
}

void evolve_visit(const TransitionTable& table, int n,
                  const std::function<void(int, const std::vector<double>&)>& visit) {
    if (n > table.radius) throw Error(ErrorCode::InvalidArgument, "transition table is too small");
    const std::size_t size = 2 * static_cast<std::size_t>(n) + 1;
    std::vector<double> current(size, 0.0), next(size, 0.0);
    current[n] = 1.0;
    const double* plus = table.plus.data() + (table.radius - n);
    const double* minus = table.minus.data() + (table.radius - n);
    const double* stay = table.lazy ? table.stay.data() + (table.radius - n) : nullptr;
    for (int k = 1; k <= n; ++k) {
        // Offsets of the wrong parity stay exactly zero for the non-lazy walk.
        const int step = table.lazy ? 1 : 2;
        const int lo = n - k;
        const int hi = n + k;
        for (int i = lo; i <= hi; i += step) {
            double v = 0.0;
            if (i - 1 >= 0) v += plus[i - 1] * current[i - 1];
            if (i + 1 < static_cast<int>(size)) v += minus[i + 1] * current[i + 1];
            if (stay) v += stay[i] * current[i];
            next[i] = v;
        }
        current.swap(next);
        visit(k, current);
    }
    if (n > 0) check_mass(std::accumulate(current.begin(), current.end(), 0.0), n);
}

namespace {

LatticeDistribution run_exact(const TransitionTable& table, double x, double alpha, int n) {
    LatticeDistribution out;
    out.x = x;
    out.alpha = alpha;
    out.n = n;
    out.lazy = table.lazy;
    if (n == 0) {
        out.probabilities = {1.0};
        return out;
    }
    evolve_visit(table, n, [&](int k, const std::vector<double>& d) {
        if (k == n) out.probabilities = d;
    });
    const double sum = std::accumulate(out.probabilities.begin(), out.probabilities.end(), 0.0);
    out.mass_drift = std::abs(sum - 1.0);
    return out;
}

}  // namespace

LatticeDistribution evolve_exact(const Environment& env, double x, int n, int cap) {
    check_cap(n, cap);
    return run_exact(transition_table(env, x, n), x, env.alpha, n);
}

LatticeDistribution evolve_exact(const LazyEnvironment& env, double x, int n, int cap) {
    check_cap(n, cap);
    return run_exact(transition_table(env, x, n), x, env.alpha, n);
}

double expectation(const LatticeDistribution& dist, const PeriodicFunction& psi) {
    const int r = dist.radius();
    double sum = 0.0;
    for (int m = -r; m <= r; ++m) {
        const double w = dist.probabilities[m + r];
        if (w != 0.0) sum += w * psi.evaluate(circle_point(dist.x, dist.alpha, m));
    }
    return sum;
}

SlopeFit fit_loglog(const std::vector<int>& ns, const std::vector<double>& gaps, int n_lo, int n_hi) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < n_lo || ns[i] > n_hi) continue;
        if (!(std::abs(gaps[i]) > 0.0)) continue;
        xs.push_back(std::log(static_cast<double>(ns[i])));
        ys.push_back(std::log(std::abs(gaps[i])));
    }
    SlopeFit fit;
    fit.n_lo = n_lo;
    fit.n_hi = n_hi;
    if (xs.size() < 2) {
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.r2 = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const LineFit line = fit_line(xs, ys);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.r2 = line.r2;
    return fit;
}

std::pair<int, int> upper_half_window(const std::vector<int>& ns) {
    if (ns.empty()) return {0, 0};
    std::vector<int> sorted = ns;
    std::sort(sorted.begin(), sorted.end());
    return {sorted[sorted.size() / 2], sorted.back()};
}

MixingCurve mixing_curve(const Environment& env, double x, const PeriodicFunction& psi, double nu,
                         const std::vector<int>& ns, std::optional<std::pair<int, int>> window, int cap) {
    if (ns.empty()) throw Error(ErrorCode::InvalidArgument, "empty step list");
    const int n_max = *std::max_element(ns.begin(), ns.end());
    check_cap(n_max, cap);
    const TransitionTable table = transition_table(env, x, n_max);
    const std::vector<double> values = orbit_values(psi, x, env.alpha, n_max);
    std::vector<double> expectations(ns.size(), 0.0);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] == 0) expectations[i] = values[n_max];
    }
    evolve_visit(table, n_max, [&](int k, const std::vector<double>& d) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (ns[i] == k) expectations[i] = orbit_sum(d, values, n_max, n_max, 1);
        }
    });
    MixingCurve curve;
    curve.x = x;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        curve.rows.push_back({ns[i], expectations[i], nu, expectations[i] - nu});
        gaps.push_back(expectations[i] - nu);
    }
    const auto w = window.value_or(upper_half_window(ns));
    curve.fit = fit_loglog(ns, gaps, w.first, w.second);
    return curve;
}

CesaroEstimate cesaro_nu(const Environment& env, const PeriodicFunction& psi, int N, const std::vector<double>& starts,
                         int cap, unsigned threads) {
    check_cap(N, cap);
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    if (starts.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one start");
    CesaroEstimate out;
    out.N = N;
    out.per_start.assign(starts.size(), 0.0);
    parallel_for(starts.size(), [&](std::size_t s) {
        const TransitionTable table = transition_table(env, starts[s], N);
        const std::vector<double> values = orbit_values(psi, starts[s], env.alpha, N);
        double total = 0.0;
        evolve_visit(table, N, [&](int k, const std::vector<double>& d) {
            // Only offsets with the parity of k carry mass.
            const int lo = N - k;
            double sum = 0.0;
            for (int i = lo; i <= N + k; i += 2) sum += d[i] * values[i];
            total += sum;
        });
        out.per_start[s] = total / N;
    }, threads);
    const auto [lo, hi] = std::minmax_element(out.per_start.begin(), out.per_start.end());
    out.spread = *hi - *lo;
    out.estimate = std::accumulate(out.per_start.begin(), out.per_start.end(), 0.0) / out.per_start.size();
    return out;
}

namespace {

PathSample walk_path(const TransitionTable& table, double x, int n, std::uint64_t seed, std::uint64_t stream) {
    PathSample path;
    path.x = x;
    path.alpha = table.alpha;
    path.seed = seed;
    path.stream = stream;
    path.offsets.reserve(n + 1);
    Philox rng(seed, stream);
    int m = 0;
    path.offsets.push_back(0);
    for (int k = 0; k < n; ++k) {
        const double u = rng.uniform();
        const std::size_t i = table.index(m);
        const double s = table.lazy ? table.stay[i] : 0.0;
        if (u < s) {
            // stay
        } else if (u < s + table.plus[i]) {
            ++m;
        } else {
            --m;
        }
        path.offsets.push_back(m);
    }
    for (std::size_t k = 0; k < path.offsets.size(); ++k) {
        if (k == 0 || path.offsets[k] != path.offsets[k - 1]) {
            path.accelerated.push_back(path.offsets[k]);
            path.holding.push_back(1);
            path.stays.push_back(table.lazy ? table.stay[table.index(path.offsets[k])] : 0.0);
        } else {
            ++path.holding.back();
        }
    }
    path.last_censored = true;
    return path;
}

}  // namespace

PathSample sample_path(const Environment& env, double x, int n, std::uint64_t seed, std::uint64_t stream) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
    return walk_path(transition_table(env, x, n), x, n, seed, stream);
}

PathSample sample_path(const LazyEnvironment& env, double x, int n, std::uint64_t seed, std::uint64_t stream) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
    return walk_path(transition_table(env, x, n), x, n, seed, stream);
}

Segment segment_stop(const PathSample& path, double epsilon0, int n) {
    if (!(epsilon0 > 0.0) || n <= 0) {
        throw Error(ErrorCode::InvalidArgument, "stopping level epsilon0 n / 2 must be positive");
    }
    const double threshold = 0.5 * epsilon0 * n;
    double total = 0.0;
    for (std::size_t k = 0; k < path.accelerated.size(); ++k) {
        total += 1.0 / (1.0 - path.stays[k]);
        if (total >= threshold) {
            std::vector<double> stays(path.stays.begin(), path.stays.begin() + static_cast<long>(k) + 1);
            const double endpoint = circle_point(path.x, path.alpha, path.accelerated[k]);
            return Segment::from_stays(std::move(stays), endpoint);
        }
    }
    std::ostringstream msg;
    msg << "path visits " << path.accelerated.size() << " sites with T = " << total << " < " << threshold;
    throw Error(ErrorCode::SegmentIncomplete, msg.str());
}

LatticeDistribution empirical_distribution(const Environment& env, double x, int n, std::uint64_t samples,
                                           std::uint64_t seed, unsigned threads) {
    const TransitionTable table = transition_table(env, x, n);
    const std::size_t chunks = 64;
    std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(2 * n + 1, 0));
    parallel_for(chunks, [&](std::size_t c) {
        Philox rng(seed, c);
        const std::uint64_t begin = samples * c / chunks;
        const std::uint64_t end = samples * (c + 1) / chunks;
        for (std::uint64_t i = begin; i < end; ++i) {
            int m = 0;
            for (int k = 0; k < n; ++k) m += rng.uniform() < table.plus[table.index(m)] ? 1 : -1;
            ++counts[c][m + n];
        }
    }, threads);
    LatticeDistribution out;
    out.x = x;
    out.alpha = env.alpha;
    out.n = n;
    out.probabilities.assign(2 * n + 1, 0.0);
    for (int i = 0; i <= 2 * n; ++i) {
        std::uint64_t total = 0;
        for (std::size_t c = 0; c < chunks; ++c) total += counts[c][i];
        out.probabilities[i] = static_cast<double>(total) / static_cast<double>(samples);
    }
    return out;
}

double total_variation(const LatticeDistribution& a, const LatticeDistribution& b) {
    const int r = std::max(a.radius(), b.radius());
    double sum = 0.0;
    for (int m = -r; m <= r; ++m) sum += std::abs(a.at(m) - b.at(m));
    return 0.5 * sum;
}

DensitySampler::DensitySampler(const PeriodicFunction& rho, std::size_t grid_size) {
    const std::vector<double> v = rho.sample(grid_size);
    cdf_.assign(grid_size + 1, 0.0);
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double a = std::max(v[j], 0.0);
        const double b = std::max(v[(j + 1) % grid_size], 0.0);
        cdf_[j + 1] = cdf_[j] + 0.5 * (a + b);
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "density has no mass");
    for (double& c : cdf_) c /= total;
}

double DensitySampler::operator()(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t j = static_cast<std::size_t>(std::max<long>(0, (it - cdf_.begin()) - 1));
    j = std::min(j, cdf_.size() - 2);
    const double width = cdf_[j + 1] - cdf_[j];
    const double t = width > 0.0 ? (u - cdf_[j]) / width : 0.0;
    const double g = static_cast<double>(cdf_.size() - 1);
    return (static_cast<double>(j) + t) / g;
}

double kolmogorov_smirnov_normal(std::vector<double> samples, double sigma2) {
    if (!(sigma2 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    const double scale = 1.0 / std::sqrt(2.0 * sigma2);
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = 0.5 * std::erfc(-samples[i] * scale);
        d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    return d;
}

CltResult clt_experiment(const Environment& env, const PeriodicFunction& rho, const PeriodicFunction& psi,
                         double sigma2, int N, int trials, std::uint64_t seed, unsigned threads) {
    if (N < 1 || trials < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 1 and at least 2 trials");
    const DensitySampler sampler(rho);
    std::vector<double> statistics(static_cast<std::size_t>(trials), 0.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Philox rng(seed, t);
        const double x0 = sampler(rng.uniform());
        // Orbit values are filled in lazily; a path of N steps visits few offsets.
        std::vector<double> p_cache(2 * static_cast<std::size_t>(N) + 1, nan);
        std::vector<double> psi_cache(2 * static_cast<std::size_t>(N) + 1, nan);
        int m = 0;
        double sum = 0.0;
        for (int k = 0; k < N; ++k) {
            double& p = p_cache[m + N];
            if (std::isnan(p)) p = env.p.evaluate(circle_point(x0, env.alpha, m));
            m += rng.uniform() < p ? 1 : -1;
            double& v = psi_cache[m + N];
            if (std::isnan(v)) v = psi.evaluate(circle_point(x0, env.alpha, m));
            sum += v;
        }
        statistics[t] = sum / std::sqrt(static_cast<double>(N));
    }, threads);
    CltResult result;
    result.N = N;
    result.trials = trials;
    result.seed = seed;
    result.sigma2 = sigma2;
    const double n = static_cast<double>(trials);
    result.mean = std::accumulate(statistics.begin(), statistics.end(), 0.0) / n;
    double ss = 0.0;
    for (double s : statistics) ss += (s - result.mean) * (s - result.mean);
    result.variance = ss / (n - 1.0);
    result.degenerate = !(sigma2 > 0.0) && psi.coefficient_l1() > 0.0;
    result.ks = kolmogorov_smirnov_normal(statistics, sigma2);
    return result;
}

}  // namespace evp
