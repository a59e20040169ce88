#pragma once

// Slow mixing for Liouville rotation numbers: the arc unions G_q^+-, the
// reachable-set certificate, the staged observable phi = sum phi_n and its
// witness table.

#include "evp/arithmetic.hpp"
#include "evp/environment.hpp"
#include "evp/walk.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace evp {

enum class Side { Plus, Minus };

std::string to_string(Side s);

/// Closed interval [lo, hi] on the line; lo may be negative for arcs that
/// wrap around 0.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// Points within 1/(16q) of {j/q} (Plus), or of {j/q + 1/(2q)} (Minus).
struct SupportSet {
    std::int64_t q = 1;
    Side side = Side::Plus;

    BigRational radius() const;
    BigRational center(std::int64_t j) const;
    /// Exactly 1/8.
    BigRational measure() const;
    std::vector<Interval> intervals() const;
    /// Signed distance u from x to the nearest center, times q, exact for the
    /// double x; x is in the set iff |u| < 1/16.
    BigRational scaled_offset(double x) const;
    bool contains(double x) const;
    /// per_arc interior points of every arc, midpoint rule.
    std::vector<double> grid(int per_arc) const;
};

/// (G_q^+, G_q^-).
std::pair<SupportSet, SupportSet> support_sets(std::int64_t q);

struct LemmaCertificate {
    std::int64_t q = 0;
    BigInt p;
    double gamma = 2.0;
    std::int64_t q_tilde = 0;
    double x = 0.0;
    std::optional<Side> membership;
    /// |u| + q_tilde max|q alpha - p| over the enclosure, as a double; the
    /// comparison with 1/8 itself is done in exact rationals.
    double worst_reach = 0.0;
    bool support_check = false;
    std::optional<double> expectation;  // E_x cos(2 pi q X_qtilde); empty past the step cap
    bool bound_holds = false;
};

/// Enclosure of the environment's alpha: the certified one when present,
/// otherwise the exact value of the double.
RealEnclosure alpha_enclosure(const Environment& env);

/// Throws PreconditionFailed unless |q alpha - p| < 1/(16 q^gamma) over the
/// whole enclosure of alpha.
LemmaCertificate lemma_certificate(const Environment& env, std::int64_t q, const BigInt& p, double gamma, double x,
                                   int cap = kDefaultStepCap);

/// Zero-tolerance support check for the whole arc union: 1/16 + q_tilde
/// max|q alpha - p| < 1/8.
bool lemma_support_holds(const Environment& env, std::int64_t q, const BigInt& p, std::int64_t q_tilde);

/// Coefficients of T^steps f, propagated mode by mode. Modes beyond
/// max_degree are dropped and their l1 mass is added to `dropped`, an upper
/// bound on the sup-norm error.
struct Propagated {
    PeriodicFunction function;
    double dropped = 0.0;
};

Propagated propagate(const Environment& env, const PeriodicFunction& f, int steps, int max_degree);

struct NuValue {
    double value = 0.0;
    double bar = 0.0;
    std::string source;  // "density" or "cesaro"
};

struct StageRecord {
    int n = 0;
    BigInt p;
    BigInt q;
    double gamma = 2.0;
    std::int64_t q_tilde = 0;
    double candidate_amplitude = 0.0;  // q^{-sqrt(n+1)}
    double amplitude = 0.0;            // 0 or the candidate
    bool approximation_ok = false;
    bool growth_ok = true;             // vacuous at n = 1
    bool support_ok = false;
    Side side = Side::Minus;
    bool side_tie = false;             // |nu(candidate)| within twice its bar
    NuValue nu_candidate;
    NuValue nu_previous;
    double threshold = 0.0;            // (sqrt 2 / 4) q^{-sqrt(n+1)}
    double h_measure = 0.0;
    double support_measure = 0.125;
    bool zeroed = false;               // phi_n = 0, witness set = H_n
    std::vector<Interval> witness_set;
    double witness_measure = 0.0;
    int grid_points = 0;               // points of the witness set that were checked
    std::string evaluation;            // "exact-dp" or "propagated"
    double propagation_error = 0.0;
    double spot_check_error = 0.0;     // max |propagated - DP| at spot points
    double min_margin = 0.0;           // min |E psi_n - nu(psi_n)| - bar - threshold
    bool certified = false;
    double tail_bound = 0.0;           // 2 sum_{j > n} candidate amplitudes
    bool tail_ok = false;              // tail_bound <= 0.003 q^{-sqrt(n+1)}
};

struct SmoothnessProxy {
    int max_order = 4;
    int extrapolated_stages = 0;
    std::vector<double> log10_sum;        // per order r = 0..max_order
    std::vector<double> log10_increment;  // last increment per order
    bool converged = false;
};

struct LiouvilleObservable {
    std::vector<StageRecord> stages;
    PeriodicFunction phi;
    NuValue nu_phi;
    bool truncated = false;
    int requested_stages = 0;
    std::string notice;
    SmoothnessProxy smoothness;
};

struct ObservableOptions {
    int stages = 2;
    int cesaro_N = 4096;
    int dp_cap = kDefaultStepCap;
    int points_per_arc = 256;
    int min_grid = 1 << 18;
    unsigned threads = 0;
};

/// Default environment for the construction: p = 1/2 + cos(2 pi x)/4.
PeriodicFunction liouville_default_p();

/// Runs the staged construction along the convergents of env.rotation.
/// Throws StageInfeasible if not even the first stage exists, NuResolution if
/// nu cannot be resolved to 10% of a stage amplitude.
LiouvilleObservable build_observable(const Environment& env, const ObservableOptions& options = {});

/// Tail of sum a_n (2 pi q_n)^r along the built stages, continued with the
/// smallest schedule compatible with the approximation condition.
SmoothnessProxy smoothness_proxy(const std::vector<StageRecord>& stages, int max_order = 4);

struct WitnessRow {
    int n = 0;
    std::int64_t q_tilde = 0;
    double expectation = 0.0;
    double gap = 0.0;        // |E_x phi(X_qtilde) - nu(phi)|
    double bound = 0.0;      // 0.3 q_tilde^{-sqrt(n+1)/n}
    bool exact = true;
    double ci_half_width = 0.0;  // Monte Carlo rows
    bool in_witness_set = false;
    bool claimed = false;    // lower bound asserted for this row
    bool holds = false;
};

WitnessRow witness_row(const Environment& env, const LiouvilleObservable& obs, std::size_t stage, double x,
                       int cap = kDefaultStepCap, std::uint64_t seed = 0, std::uint64_t samples = 20000);

std::vector<WitnessRow> slow_mixing_witness(const Environment& env, const LiouvilleObservable& obs, double x,
                                            int cap = kDefaultStepCap, std::uint64_t seed = 0,
                                            std::uint64_t samples = 20000);

}  // namespace evp
