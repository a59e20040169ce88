#include "evp/fft.hpp"

#include "evp/errors.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace evp {

namespace {

struct PlanPair {
    fftw_plan forward = nullptr;   // real -> half complex
    fftw_plan backward = nullptr;  // half complex -> real
};

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanPair get(std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        // Plans are created on fftw_malloc'd buffers, so later executes on
        // other fftw_malloc'd buffers share the alignment.
        double* real = fftw_alloc_real(n);
        fftw_complex* half = fftw_alloc_complex(n / 2 + 1);
        PlanPair pair;
        pair.forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, half, FFTW_ESTIMATE);
        pair.backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), half, real, FFTW_ESTIMATE);
        fftw_free(real);
        fftw_free(half);
        plans_.emplace(n, pair);
        return pair;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, PlanPair> plans_;
};

struct RealBuffer {
    explicit RealBuffer(std::size_t n) : data(fftw_alloc_real(n)) {}
    ~RealBuffer() { fftw_free(data); }
    double* data;
};

struct ComplexBuffer {
    explicit ComplexBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
    ~ComplexBuffer() { fftw_free(data); }
    fftw_complex* data;
};

}  // namespace

std::vector<double> coefficients_to_grid(const std::vector<Complex>& coefficients, std::size_t grid_size) {
    const int K = static_cast<int>(coefficients.size() / 2);
    if (coefficients.size() % 2 != 1) throw Error(ErrorCode::InvalidArgument, "coefficient array must have odd length");
    if (grid_size <= static_cast<std::size_t>(2 * K)) {
        throw Error(ErrorCode::InvalidArgument, "grid of size " + std::to_string(grid_size) +
                                                    " cannot resolve degree " + std::to_string(K));
    }
    const PlanPair plans = PlanCache::instance().get(grid_size);
    ComplexBuffer half(grid_size / 2 + 1);
    RealBuffer real(grid_size);
    for (std::size_t k = 0; k <= grid_size / 2; ++k) {
        half.data[k][0] = 0.0;
        half.data[k][1] = 0.0;
    }
    for (int k = 0; k <= K; ++k) {
        Complex c = coefficients[K + k];
        // The Nyquist bin of an even grid receives both +-G/2 modes.
        if (2 * static_cast<std::size_t>(k) == grid_size) c = Complex(c.real(), 0.0);
        half.data[k][0] = c.real();
        half.data[k][1] = c.imag();
    }
    fftw_execute_dft_c2r(plans.backward, half.data, real.data);
    return std::vector<double>(real.data, real.data + grid_size);
}

std::vector<Complex> grid_to_coefficients(const std::vector<double>& values, int degree) {
    const std::size_t n = values.size();
    if (degree < 0 || n <= static_cast<std::size_t>(2 * degree)) {
        throw Error(ErrorCode::InvalidArgument, "grid of size " + std::to_string(n) + " cannot resolve degree " +
                                                    std::to_string(degree));
    }
    const PlanPair plans = PlanCache::instance().get(n);
    RealBuffer real(n);
    ComplexBuffer half(n / 2 + 1);
    std::copy(values.begin(), values.end(), real.data);
    fftw_execute_dft_r2c(plans.forward, real.data, half.data);
    std::vector<Complex> out(2 * degree + 1);
    const double scale = 1.0 / static_cast<double>(n);
    for (int k = 0; k <= degree; ++k) {
        const Complex c(half.data[k][0] * scale, half.data[k][1] * scale);
        out[degree + k] = c;
        out[degree - k] = std::conj(c);
    }
    out[degree] = Complex(out[degree].real(), 0.0);
    return out;
}

}  // namespace evp
