#pragma once

#include "evp/errors.hpp"
#include "evp/periodic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace evp::testing {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no evp::Error thrown";
    return ErrorCode::InvalidArgument;
}

/// Real trigonometric polynomial with coefficients uniform in a box of the given scale.
inline PeriodicFunction random_poly(std::mt19937_64& rng, int K, double scale = 1.0, bool zero_mean = false) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<Complex> c(2 * K + 1);
    c[K] = zero_mean ? 0.0 : u(rng);
    for (int k = 1; k <= K; ++k) {
        c[K + k] = Complex(u(rng), u(rng));
        c[K - k] = std::conj(c[K + k]);
    }
    return PeriodicFunction(c);
}

/// Term-by-term sum_{k} c_k e^{2 pi i k x}, real part.
inline double direct_sum(const PeriodicFunction& f, double x) {
    double s = 0.0;
    for (int k = -f.degree(); k <= f.degree(); ++k) {
        const Complex c = f.coefficient(k);
        s += c.real() * std::cos(kTwoPi * k * x) - c.imag() * std::sin(kTwoPi * k * x);
    }
    return s;
}

inline double sup_on_grid(const std::function<double(double)>& f, int G = 4096) {
    double m = 0.0;
    for (int j = 0; j < G; ++j) m = std::max(m, std::abs(f(static_cast<double>(j) / G)));
    return m;
}

inline const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace evp::testing
