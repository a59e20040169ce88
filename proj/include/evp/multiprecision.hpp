#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <mutex>
#include <string>

namespace evp {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 512;

/// Sets the working precision of BigFloat and restores the previous one on
/// exit. The default precision is process-wide, so scopes are serialized
/// across threads; threaded hot loops use raw MPFR with explicit precision.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    std::unique_lock<std::recursive_mutex> lock_;
    unsigned previous_digits10_ = 0;
};

unsigned bits_to_digits10(unsigned bits);

/// Exact rational value of a BigFloat (every binary float is a dyadic rational).
BigRational to_rational(const BigFloat& x);
BigFloat to_float(const BigRational& q);

std::string to_decimal_string(const BigInt& v);
std::string to_decimal_string(const BigFloat& v, int digits = 40);

/// Widens the MPFR exponent range of the calling thread to its maximum.
void ensure_wide_exponent_range();

}  // namespace evp
