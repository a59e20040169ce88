#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace evp {

using Complex = std::complex<double>;

/// Samples sum_{|k|<=K} c_k e^{2 pi i k j/G} at j = 0..G-1. `coefficients`
/// holds c_{-K}..c_K and must be Hermitian; G must exceed 2K.
std::vector<double> coefficients_to_grid(const std::vector<Complex>& coefficients, std::size_t grid_size);

/// Fourier coefficients c_{-K}..c_K of uniform samples v_0..v_{G-1}.
/// Modes above G/2 are unavailable; K must satisfy 2K < G.
std::vector<Complex> grid_to_coefficients(const std::vector<double>& values, int degree);

}  // namespace evp
