#include "evp/periodic.hpp"

#include "evp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evp {

std::size_t default_grid_size(int degree) {
    return std::max<std::size_t>(4 * static_cast<std::size_t>(degree) + 4, 4096);
}

Complex unit_phase(double t) {
    double frac = t - std::floor(t);
    return std::polar(1.0, kTwoPi * frac);
}

PeriodicFunction::PeriodicFunction() : PeriodicFunction(std::vector<Complex>{Complex(0.0, 0.0)}, Unchecked{}) {}

PeriodicFunction::PeriodicFunction(std::vector<Complex> coefficients) {
    if (coefficients.size() % 2 != 1) {
        throw Error(ErrorCode::InvalidArgument, "coefficient array must have odd length 2K+1");
    }
    const int K = static_cast<int>(coefficients.size() / 2);
    double scale = 0.0;
    for (const Complex& c : coefficients) scale = std::max(scale, std::abs(c));
    for (int k = 0; k <= K; ++k) {
        const double defect = std::abs(coefficients[K + k] - std::conj(coefficients[K - k]));
        if (defect > 1e-12 * std::max(scale, 1e-300)) {
            throw Error(ErrorCode::InvalidArgument,
                        "coefficients are not Hermitian at k=" + std::to_string(k) + " (function is not real)");
        }
    }
    *this = hermitian_part(std::move(coefficients));
}

PeriodicFunction::PeriodicFunction(std::vector<Complex> coefficients, Unchecked)
    : degree_(static_cast<int>(coefficients.size() / 2)), coefficients_(std::move(coefficients)) {
    build_grid();
}

PeriodicFunction PeriodicFunction::hermitian_part(std::vector<Complex> c) {
    if (c.size() % 2 != 1) throw Error(ErrorCode::InvalidArgument, "coefficient array must have odd length 2K+1");
    const int K = static_cast<int>(c.size() / 2);
    for (int k = 1; k <= K; ++k) {
        const Complex avg = 0.5 * (c[K + k] + std::conj(c[K - k]));
        c[K + k] = avg;
        c[K - k] = std::conj(avg);
    }
    c[K] = Complex(c[K].real(), 0.0);
    return PeriodicFunction(std::move(c), Unchecked{});
}

void PeriodicFunction::build_grid() {
    grid_ = std::make_shared<const std::vector<double>>(coefficients_to_grid(coefficients_, default_grid_size(degree_)));
}

PeriodicFunction PeriodicFunction::constant(double c) {
    return PeriodicFunction(std::vector<Complex>{Complex(c, 0.0)}, Unchecked{});
}

PeriodicFunction PeriodicFunction::cosine(int k, double amplitude, double phase) {
    k = std::abs(k);
    if (k == 0) return constant(amplitude * std::cos(phase));
    std::vector<Complex> c(2 * k + 1);
    c[2 * k] = 0.5 * amplitude * std::polar(1.0, phase);
    c[0] = std::conj(c[2 * k]);
    return PeriodicFunction(std::move(c), Unchecked{});
}

PeriodicFunction PeriodicFunction::sine(int k, double amplitude) {
    if (k == 0) return constant(0.0);
    return cosine(k, amplitude, -kTwoPi / 4.0);
}

PeriodicFunction PeriodicFunction::from_grid(const std::vector<double>& values, int degree) {
    return hermitian_part(grid_to_coefficients(values, degree));
}

Complex PeriodicFunction::coefficient(int k) const {
    if (k < -degree_ || k > degree_) return Complex(0.0, 0.0);
    return coefficients_[degree_ + k];
}

double PeriodicFunction::evaluate(double x) const {
    const double frac = x - std::floor(x);
    double sum = coefficients_[degree_].real();
    for (int k = 1; k <= degree_; ++k) {
        const Complex& c = coefficients_[degree_ + k];
        if (c == Complex(0.0, 0.0)) continue;
        const double t = static_cast<double>(k) * frac;
        const double angle = kTwoPi * (t - std::floor(t));
        sum += 2.0 * (c.real() * std::cos(angle) - c.imag() * std::sin(angle));
    }
    return sum;
}

std::vector<double> PeriodicFunction::sample(std::size_t grid_size) const {
    if (grid_size == grid_->size()) return *grid_;
    return coefficients_to_grid(coefficients_, grid_size);
}

double PeriodicFunction::grid_min() const { return *std::min_element(grid_->begin(), grid_->end()); }
double PeriodicFunction::grid_max() const { return *std::max_element(grid_->begin(), grid_->end()); }
double PeriodicFunction::grid_sup() const { return std::max(std::abs(grid_min()), std::abs(grid_max())); }

PeriodicFunction PeriodicFunction::shifted(double a) const {
    std::vector<Complex> c = coefficients_;
    const double frac = a - std::floor(a);
    for (int k = 1; k <= degree_; ++k) {
        const double t = static_cast<double>(k) * frac;
        const Complex phase = unit_phase(t);
        c[degree_ + k] *= phase;
        c[degree_ - k] = std::conj(c[degree_ + k]);
    }
    return PeriodicFunction(std::move(c), Unchecked{});
}

PeriodicFunction PeriodicFunction::reflected() const {
    std::vector<Complex> c(coefficients_.rbegin(), coefficients_.rend());
    return PeriodicFunction(std::move(c), Unchecked{});
}

PeriodicFunction PeriodicFunction::derivative(int order) const {
    if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
    std::vector<Complex> c = coefficients_;
    for (int k = -degree_; k <= degree_; ++k) {
        Complex factor(1.0, 0.0);
        const Complex step(0.0, kTwoPi * k);
        for (int j = 0; j < order; ++j) factor *= step;
        c[degree_ + k] *= factor;
    }
    return hermitian_part(std::move(c));
}

PeriodicFunction PeriodicFunction::truncated(int degree) const {
    if (degree >= degree_) return *this;
    degree = std::max(degree, 0);
    std::vector<Complex> c(coefficients_.begin() + (degree_ - degree), coefficients_.begin() + (degree_ + degree + 1));
    return PeriodicFunction(std::move(c), Unchecked{});
}

PeriodicFunction PeriodicFunction::trimmed(double tolerance) const {
    int K = degree_;
    while (K > 0 && std::abs(coefficients_[degree_ + K]) < tolerance) --K;
    return truncated(K);
}

double PeriodicFunction::cr_norm_upper(int r) const {
    if (r < 0) throw Error(ErrorCode::InvalidArgument, "r must be >= 0");
    double best = 0.0;
    for (int j = 0; j <= r; ++j) {
        double sum = 0.0;
        for (int k = -degree_; k <= degree_; ++k) {
            sum += std::pow(kTwoPi * std::abs(k), j) * std::abs(coefficients_[degree_ + k]);
        }
        best = std::max(best, sum);
    }
    return best;
}

double PeriodicFunction::cr_norm_lower(int r) const {
    if (r < 0) throw Error(ErrorCode::InvalidArgument, "r must be >= 0");
    double best = grid_sup();
    for (int j = 1; j <= r; ++j) best = std::max(best, derivative(j).grid_sup());
    return best;
}

double PeriodicFunction::coefficient_l1() const {
    double sum = 0.0;
    for (const Complex& c : coefficients_) sum += std::abs(c);
    return sum;
}

namespace {

std::vector<Complex> padded(const PeriodicFunction& f, int K) {
    std::vector<Complex> c(2 * K + 1, Complex(0.0, 0.0));
    const int Kf = f.degree();
    for (int k = -Kf; k <= Kf; ++k) c[K + k] = f.coefficients()[Kf + k];
    return c;
}

}  // namespace

PeriodicFunction operator+(const PeriodicFunction& f, const PeriodicFunction& g) {
    const int K = std::max(f.degree(), g.degree());
    std::vector<Complex> c = padded(f, K);
    for (int k = -g.degree(); k <= g.degree(); ++k) c[K + k] += g.coefficients()[g.degree() + k];
    return PeriodicFunction::hermitian_part(std::move(c));
}

PeriodicFunction operator-(const PeriodicFunction& f) { return -1.0 * f; }
PeriodicFunction operator-(const PeriodicFunction& f, const PeriodicFunction& g) { return f + (-g); }

PeriodicFunction operator*(double a, const PeriodicFunction& f) {
    std::vector<Complex> c = f.coefficients();
    for (Complex& v : c) v *= a;
    return PeriodicFunction::hermitian_part(std::move(c));
}

PeriodicFunction operator*(const PeriodicFunction& f, double a) { return a * f; }

PeriodicFunction operator+(const PeriodicFunction& f, double c) {
    std::vector<Complex> v = f.coefficients();
    v[f.degree()] += c;
    return PeriodicFunction::hermitian_part(std::move(v));
}

PeriodicFunction operator-(const PeriodicFunction& f, double c) { return f + (-c); }
PeriodicFunction operator+(double c, const PeriodicFunction& f) { return f + c; }
PeriodicFunction operator-(double c, const PeriodicFunction& f) { return (-f) + c; }

PeriodicFunction operator*(const PeriodicFunction& f, const PeriodicFunction& g) {
    const int Kf = f.degree();
    const int Kg = g.degree();
    const int K = Kf + Kg;
    std::vector<Complex> c(2 * K + 1, Complex(0.0, 0.0));
    const auto& a = f.coefficients();
    const auto& b = g.coefficients();
    for (int i = -Kf; i <= Kf; ++i) {
        const Complex ai = a[Kf + i];
        if (ai == Complex(0.0, 0.0)) continue;
        for (int j = -Kg; j <= Kg; ++j) c[K + i + j] += ai * b[Kg + j];
    }
    return PeriodicFunction::hermitian_part(std::move(c));
}

PeriodicFunction add(const PeriodicFunction& f, const PeriodicFunction& g) { return f + g; }
PeriodicFunction multiply(const PeriodicFunction& f, const PeriodicFunction& g) { return f * g; }
PeriodicFunction shift_by_alpha(const PeriodicFunction& f, double alpha) { return f.shifted(alpha); }

double pairing(const PeriodicFunction& f, const PeriodicFunction& g) {
    const int K = std::min(f.degree(), g.degree());
    double sum = 0.0;
    for (int k = -K; k <= K; ++k) sum += (f.coefficient(k) * g.coefficient(-k)).real();
    return sum;
}

Truncated apply_pointwise(const PeriodicFunction& f, const std::function<double(double)>& fn, int k_target) {
    if (k_target < 0) throw Error(ErrorCode::InvalidArgument, "K_target must be >= 0");
    std::size_t grid_size = 4096;
    const std::size_t needed = 4 * static_cast<std::size_t>(f.degree() + k_target) + 4;
    while (grid_size < needed) grid_size *= 2;
    std::vector<double> values = f.sample(grid_size);
    for (double& v : values) v = fn(v);
    const int available = static_cast<int>(grid_size / 2) - 1;
    const std::vector<Complex> all = grid_to_coefficients(values, available);
    double tail = 0.0;
    for (int k = k_target + 1; k <= available; ++k) tail += 2.0 * std::abs(all[available + k]);
    std::vector<Complex> kept(all.begin() + (available - k_target), all.begin() + (available + k_target + 1));
    PeriodicFunction h = PeriodicFunction::hermitian_part(std::move(kept));
    // Modes at rounding level carry no information; dropping them keeps degrees small.
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    PeriodicFunction trimmed = h.trimmed(2e-16 * scale);
    for (int k = trimmed.degree() + 1; k <= h.degree(); ++k) tail += 2.0 * std::abs(h.coefficient(k));
    return {trimmed, tail};
}

namespace {

void require_positive(const PeriodicFunction& f, const char* op) {
    const std::vector<double>& grid = f.grid();
    const auto it = std::min_element(grid.begin(), grid.end());
    if (*it < 1e-8) {
        std::ostringstream msg;
        msg << op << " needs a positive function; grid minimum " << *it << " at x = "
            << static_cast<double>(it - grid.begin()) / static_cast<double>(grid.size());
        throw Error(ErrorCode::NonPositiveFunction, msg.str());
    }
}

}  // namespace

Truncated reciprocal(const PeriodicFunction& f, int k_target) {
    require_positive(f, "reciprocal");
    return apply_pointwise(f, [](double v) { return 1.0 / v; }, k_target);
}

Truncated log(const PeriodicFunction& f, int k_target) {
    require_positive(f, "log");
    return apply_pointwise(f, [](double v) { return std::log(v); }, k_target);
}

Truncated exp(const PeriodicFunction& f, int k_target) {
    return apply_pointwise(f, [](double v) { return std::exp(v); }, k_target);
}

Truncated logistic(const PeriodicFunction& f, int k_target) {
    return apply_pointwise(f, [](double v) { return 1.0 / (1.0 + std::exp(-v)); }, k_target);
}

}  // namespace evp
