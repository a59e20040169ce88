#include "evp/multiprecision.hpp"

#include <mpfr.h>

#include <cmath>
#include <mutex>
#include <sstream>

namespace evp {

unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

namespace {

std::recursive_mutex& precision_mutex() {
    static std::recursive_mutex m;
    return m;
}

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits) : lock_(precision_mutex()) {
    previous_digits10_ = BigFloat::default_precision();
    BigFloat::default_precision(bits_to_digits10(bits));
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(previous_digits10_); }

BigRational to_rational(const BigFloat& x) {
    if (x == 0) return BigRational(0);
    BigInt mantissa;
    const mpfr_exp_t exponent = mpfr_get_z_2exp(mantissa.backend().data(), x.backend().data());
    BigRational r(mantissa);
    if (exponent >= 0) {
        r *= BigRational(BigInt(1) << static_cast<unsigned>(exponent));
    } else {
        r /= BigRational(BigInt(1) << static_cast<unsigned>(-exponent));
    }
    return r;
}

BigFloat to_float(const BigRational& q) {
    BigFloat out;
    mpfr_set_q(out.backend().data(), q.backend().data(), MPFR_RNDN);
    return out;
}

std::string to_decimal_string(const BigInt& v) { return v.str(); }

std::string to_decimal_string(const BigFloat& v, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

void ensure_wide_exponent_range() {
    // The exponent range is per thread in a thread-safe MPFR build.
    thread_local bool done = false;
    if (done) return;
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
    done = true;
}

}  // namespace evp
