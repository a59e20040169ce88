#pragma once

// Exact and sampled evolution of the circle walk along the orbit lattice
// x + m alpha, mixing curves, Cesaro averages and CLT experiments.

#include "evp/environment.hpp"
#include "evp/geomsum.hpp"
#include "evp/periodic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace evp {

inline constexpr int kDefaultStepCap = 1 << 15;

/// Walk that stays put with probability stay(x) and otherwise moves as the
/// underlying environment.
struct LazyEnvironment {
    double alpha = 0.0;
    PeriodicFunction stay;
    PeriodicFunction plus;
    PeriodicFunction minus;
    double epsilon0 = 0.0;
};

/// plus = (1 - stay) p, minus = (1 - stay) q. Requires epsilon0 <= stay <= 1 - epsilon0
/// on the grid; epsilon0 < 0 means "use the observed margin".
LazyEnvironment make_lazy(const Environment& env, const PeriodicFunction& stay, double epsilon0 = -1.0);

/// Transition probabilities at the orbit points x + m alpha, |m| <= radius.
struct TransitionTable {
    double x = 0.0;
    double alpha = 0.0;
    int radius = 0;
    bool lazy = false;
    std::vector<double> plus;
    std::vector<double> minus;
    std::vector<double> stay;  // empty for the non-lazy walk

    double point(int m) const;
    std::size_t index(int m) const { return static_cast<std::size_t>(m + radius); }
};

TransitionTable transition_table(const Environment& env, double x, int radius);
TransitionTable transition_table(const LazyEnvironment& env, double x, int radius);

/// Values of f at x + m alpha, |m| <= radius.
std::vector<double> orbit_values(const PeriodicFunction& f, double x, double alpha, int radius);

struct LatticeDistribution {
    double x = 0.0;
    double alpha = 0.0;
    int n = 0;
    bool lazy = false;
    std::vector<double> probabilities;  // offsets -n..n
    double mass_drift = 0.0;            // |sum - 1|

    double at(int m) const;
    int radius() const { return static_cast<int>(probabilities.size() / 2); }
};

/// Point mass at offset 0 padded to the given radius.
LatticeDistribution point_mass(double x, double alpha, bool lazy);

/// Exact law after `steps` further steps. The table must cover offsets up to
/// the start's radius plus steps. Mass drift beyond 1e-12 per 1e4 steps throws.
LatticeDistribution evolve(const TransitionTable& table, const LatticeDistribution& start, int steps);

/// Calls visit(k, d) after every step k = 1..n with d indexed by offset + n.
void evolve_visit(const TransitionTable& table, int n,
                  const std::function<void(int, const std::vector<double>&)>& visit);

LatticeDistribution evolve_exact(const Environment& env, double x, int n, int cap = kDefaultStepCap);
LatticeDistribution evolve_exact(const LazyEnvironment& env, double x, int n, int cap = kDefaultStepCap);

double expectation(const LatticeDistribution& dist, const PeriodicFunction& psi);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_lo = 0;
    int n_hi = 0;
};

/// Least-squares fit of log|gap| against log n over rows with n in [n_lo, n_hi].
SlopeFit fit_loglog(const std::vector<int>& ns, const std::vector<double>& gaps, int n_lo, int n_hi);
/// Default window: the upper half of the list.
std::pair<int, int> upper_half_window(const std::vector<int>& ns);

struct MixingRow {
    int n = 0;
    double expectation = 0.0;
    double nu = 0.0;
    double gap = 0.0;
};

struct MixingCurve {
    double x = 0.0;
    std::vector<MixingRow> rows;
    SlopeFit fit;
    std::string nu_source;
    bool extended_precision = false;
};

MixingCurve mixing_curve(const Environment& env, double x, const PeriodicFunction& psi, double nu,
                         const std::vector<int>& ns, std::optional<std::pair<int, int>> window = std::nullopt,
                         int cap = kDefaultStepCap);

struct CesaroEstimate {
    double estimate = 0.0;
    double spread = 0.0;  // max - min over starts
    std::vector<double> per_start;
    int N = 0;
};

/// Averages (1/N) sum_{n=1}^N E_x psi(X_n) over each start.
CesaroEstimate cesaro_nu(const Environment& env, const PeriodicFunction& psi, int N, const std::vector<double>& starts,
                         int cap = kDefaultStepCap, unsigned threads = 0);

struct PathSample {
    double x = 0.0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<int> offsets;     // m_0..m_n
    std::vector<int> accelerated; // offsets with repetitions erased
    std::vector<int> holding;     // time spent at each accelerated site
    std::vector<double> stays;    // stay probability at each accelerated site
    bool last_censored = true;    // the final holding time is cut off at n
};

PathSample sample_path(const Environment& env, double x, int n, std::uint64_t seed, std::uint64_t stream = 0);
PathSample sample_path(const LazyEnvironment& env, double x, int n, std::uint64_t seed, std::uint64_t stream = 0);

/// First tau with T_{W(1..tau)} >= epsilon0 n / 2 over the accelerated sites.
Segment segment_stop(const PathSample& path, double epsilon0, int n);

/// Empirical law of X_n over `samples` independent paths.
LatticeDistribution empirical_distribution(const Environment& env, double x, int n, std::uint64_t samples,
                                           std::uint64_t seed, unsigned threads = 0);

double total_variation(const LatticeDistribution& a, const LatticeDistribution& b);

/// Inverse-CDF sampler for a density on a uniform grid (linear interpolation
/// of the cumulative trapezoid sums).
class DensitySampler {
public:
    DensitySampler(const PeriodicFunction& rho, std::size_t grid_size = 1 << 14);
    double operator()(double u) const;

private:
    std::vector<double> cdf_;
};

struct CltResult {
    double variance = 0.0;   // empirical variance of N^{-1/2} sum psi(X_n)
    double mean = 0.0;
    double sigma2 = 0.0;     // reference variance
    double ks = 0.0;         // Kolmogorov-Smirnov distance to N(0, sigma2); NaN if sigma2 = 0
    bool degenerate = false; // sigma2 = 0 while psi is not identically 0
    int N = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Trials use streams 0..trials-1 of `seed`; starts are drawn from rho.
CltResult clt_experiment(const Environment& env, const PeriodicFunction& rho, const PeriodicFunction& psi,
                         double sigma2, int N, int trials, std::uint64_t seed, unsigned threads = 0);

double kolmogorov_smirnov_normal(std::vector<double> samples, double sigma2);

}  // namespace evp
