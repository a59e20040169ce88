#pragma once

// Sums of independent geometric holding times: exact pmfs, finite-difference
// tables, local limit error, stopping-time tails and characteristic moduli.

#include <cstdint>
#include <vector>

namespace evp {

/// A stretch of the accelerated walk: one stay probability per visited site.
struct Segment {
    std::vector<double> stays;
    double endpoint = 0.0;  // circle point of the last site
    double T_W = 0.0;       // sum 1/(1-s)
    double sigma2_W = 0.0;  // sum s/(1-s)^2

    static Segment from_stays(std::vector<double> stays, double endpoint = 0.0);
    std::size_t length() const { return stays.size(); }
};

/// pmf on integers j_min, j_min+1, ...; the mass beyond the stored range is
/// tail_mass.
struct GeomSumPmf {
    long j_min = 0;
    std::vector<double> probabilities;
    double tail_mass = 0.0;

    double at(long j) const;
    long j_max() const { return j_min + static_cast<long>(probabilities.size()) - 1; }
    double total() const;
    double mean() const;
    double variance() const;
};

inline constexpr double kPmfTailCut = 1e-16;

/// P(l = k) = s^{k-1}(1-s) on {1, 2, ...}; s is the stay probability.
GeomSumPmf geometric_pmf(double s, double epsilon0 = 0.0);

/// pmf of f + l with l geometric of stay probability s. Entries are generated
/// by h(j) = s h(j-1) + (1-s) f(j-1) until the geometric remainder is below
/// tail_cut (0 keeps everything down to underflow).
GeomSumPmf add_geometric(const GeomSumPmf& f, double s, double tail_cut = kPmfTailCut);

/// pmf of t_W = sum of the segment's holding times.
GeomSumPmf convolve_segment(const Segment& segment);

/// Sum of n holding times with stay probability s.
GeomSumPmf iid_sum_pmf(double s, int n);

struct DeltaTable {
    int n = 0;
    int m = 0;
    long j_min = 0;               // first index j (= n, the least possible sum)
    std::vector<double> values;   // delta^m_j for j = j_min..
    double sup = 0.0;
    double scaled_sup = 0.0;      // n^{(m+1)/2} sup
};

inline constexpr int kMaxDeltaOrder = 4;

/// delta^0_j = P(S_n = j) for j >= n and delta^m = nabla delta^{m-1},
/// (nabla a)(j) = a(j+1) - a(j), with a = 0 beyond the stored support.
DeltaTable delta_table(const GeomSumPmf& pmf_of_sum, int n, int m);
DeltaTable delta_table(double s, int n, int m);

/// Inverts one difference: a(j) = -sum_{i >= j} (nabla a)(i), compensated.
std::vector<double> undo_difference(const std::vector<double>& differences);

struct LltReport {
    double scaled_error = 0.0;  // sigma_W sup_j |P(t_W = j) - N(j; T_W, sigma_W^2)|
    double sigma = 0.0;
    double mean = 0.0;
    long worst_j = 0;
};

/// Gaussian centred at the exact mean T_W.
LltReport llt_error(const Segment& segment);

/// tau = min{k : sum_{j<=k} 1/p_j > n/2}; p_j are exit (success) probabilities.
int stopping_index(const std::vector<double>& exit_probabilities, int n);

inline constexpr int kStoppingTailExactCap = 1 << 12;

/// P(|S_tau - n/2| > sqrt(n) ln n) by exact convolution, no tail truncation.
double stopping_tail_exact(const std::vector<double>& exit_probabilities, int n);

struct TailEstimate {
    double probability = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

TailEstimate stopping_tail_mc(const std::vector<double>& exit_probabilities, int n, std::uint64_t samples,
                              std::uint64_t seed);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

struct TailFit {
    double c = 0.0;  // log P ~ b - c (ln n)^2
    double b = 0.0;
    double r2 = 0.0;
};

TailFit fit_stopping_tail(const std::vector<int>& ns, const std::vector<double>& probabilities);

struct CharModulus {
    std::vector<double> t;
    std::vector<double> modulus;  // |Phi_n(t)|
    double kappa_hat = 0.0;       // min over t in (0, delta_hat] of -log|Phi_n| / (n t^2)
    double plateau = 0.0;         // max over t in [delta_hat, pi] of |Phi_n(t)|^{1/n}
    double delta_hat = 1.0;
};

/// |Phi_n(t)| = prod_j |p_j / (1 - (1 - p_j) e^{it})| with exit probabilities p_j.
CharModulus char_modulus_diagnostic(const std::vector<double>& exit_probabilities, const std::vector<double>& t_grid,
                                    double delta_hat = 1.0);

}  // namespace evp
