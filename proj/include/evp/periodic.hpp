#pragma once

// Real trigonometric polynomials on the circle R/Z.

#include "evp/fft.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace evp {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr int kDefaultKTarget = 128;

/// Default evaluation grid size for degree K: max(4K+4, 4096).
std::size_t default_grid_size(int degree);

/// e^{2 pi i t}, with t reduced mod 1 first.
Complex unit_phase(double t);

/// Real band-limited function sum_{|k|<=K} c_k e^{2 pi i k x}. Immutable; the
/// grid values on the default grid are computed at construction.
class PeriodicFunction {
public:
    PeriodicFunction();  // zero
    /// Coefficients ordered c_{-K}..c_K. Throws if they are not Hermitian to
    /// 1e-12 relative; the stored copy is exactly Hermitian.
    explicit PeriodicFunction(std::vector<Complex> coefficients);

    static PeriodicFunction constant(double c);
    /// amplitude * cos(2 pi k x + phase)
    static PeriodicFunction cosine(int k, double amplitude = 1.0, double phase = 0.0);
    static PeriodicFunction sine(int k, double amplitude = 1.0);
    /// Projection of uniform samples onto degree K (aliasing is the caller's concern).
    static PeriodicFunction from_grid(const std::vector<double>& values, int degree);
    /// Symmetrizes (c_k + conj(c_{-k}))/2 instead of rejecting rounding asymmetry.
    static PeriodicFunction hermitian_part(std::vector<Complex> coefficients);

    int degree() const { return degree_; }
    Complex coefficient(int k) const;
    const std::vector<Complex>& coefficients() const { return coefficients_; }

    double evaluate(double x) const;
    double operator()(double x) const { return evaluate(x); }

    /// Values on the uniform grid j/G.
    std::vector<double> sample(std::size_t grid_size) const;
    const std::vector<double>& grid() const { return *grid_; }
    double grid_min() const;
    double grid_max() const;
    double grid_sup() const;  // max |f| on the default grid

    double mean() const { return coefficients_[degree_].real(); }
    /// x -> f(x + a)
    PeriodicFunction shifted(double a) const;
    /// x -> f(-x)
    PeriodicFunction reflected() const;
    PeriodicFunction derivative(int order = 1) const;
    /// Drops modes above `degree`.
    PeriodicFunction truncated(int degree) const;
    /// Drops trailing modes whose modulus is below `tolerance`.
    PeriodicFunction trimmed(double tolerance) const;

    /// max_{0<=j<=r} sum_k |2 pi k|^j |c_k|
    double cr_norm_upper(int r) const;
    /// max_{0<=j<=r} grid max of |f^{(j)}|
    double cr_norm_lower(int r) const;
    /// sum_k |c_k|
    double coefficient_l1() const;

private:
    struct Unchecked {};
    PeriodicFunction(std::vector<Complex> coefficients, Unchecked);
    void build_grid();

    int degree_ = 0;
    std::vector<Complex> coefficients_;
    std::shared_ptr<const std::vector<double>> grid_;
};

PeriodicFunction operator+(const PeriodicFunction& f, const PeriodicFunction& g);
PeriodicFunction operator-(const PeriodicFunction& f, const PeriodicFunction& g);
PeriodicFunction operator-(const PeriodicFunction& f);
PeriodicFunction operator*(double a, const PeriodicFunction& f);
PeriodicFunction operator*(const PeriodicFunction& f, double a);
PeriodicFunction operator+(const PeriodicFunction& f, double c);
PeriodicFunction operator-(const PeriodicFunction& f, double c);
PeriodicFunction operator+(double c, const PeriodicFunction& f);
PeriodicFunction operator-(double c, const PeriodicFunction& f);
/// Exact product of degree K_f + K_g.
PeriodicFunction operator*(const PeriodicFunction& f, const PeriodicFunction& g);

PeriodicFunction add(const PeriodicFunction& f, const PeriodicFunction& g);
PeriodicFunction multiply(const PeriodicFunction& f, const PeriodicFunction& g);
PeriodicFunction shift_by_alpha(const PeriodicFunction& f, double alpha);

/// sum_k c_k d_{-k} = mean(f g)
double pairing(const PeriodicFunction& f, const PeriodicFunction& g);

/// Result of a grid-sampled transcendental operation truncated at K_target.
struct Truncated {
    PeriodicFunction function;
    double tail = 0.0;  // estimate of sum_{|k|>K_target} |h_k|
};

Truncated reciprocal(const PeriodicFunction& f, int k_target = kDefaultKTarget);
Truncated log(const PeriodicFunction& f, int k_target = kDefaultKTarget);
Truncated exp(const PeriodicFunction& f, int k_target = kDefaultKTarget);
/// 1 / (1 + e^{-f})
Truncated logistic(const PeriodicFunction& f, int k_target = kDefaultKTarget);
/// Pointwise map sampled on a grid of size >= 4(K_f + K_target) + 4.
Truncated apply_pointwise(const PeriodicFunction& f, const std::function<double(double)>& fn,
                          int k_target = kDefaultKTarget);

}  // namespace evp
