#include "evp/walk_extended.hpp"

#include "evp/errors.hpp"
#include "evp/montecarlo.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evp {

namespace {

/// Fixed-precision MPFR scalars with value semantics limited to what is needed.
class Mp {
public:
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    ~Mp() { mpfr_clear(v_); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

class MpArray {
public:
    MpArray(std::size_t n, mpfr_prec_t prec) : data_(n) {
        for (auto& x : data_) {
            mpfr_init2(&x, prec);
            mpfr_set_zero(&x, 1);
        }
    }
    ~MpArray() {
        for (auto& x : data_) mpfr_clear(&x);
    }
    MpArray(const MpArray&) = delete;
    MpArray& operator=(const MpArray&) = delete;
    MpArray(MpArray&& other) noexcept : data_(std::move(other.data_)) {}
    mpfr_ptr operator[](std::size_t i) { return &data_[i]; }
    mpfr_srcptr operator[](std::size_t i) const { return &data_[i]; }
    std::size_t size() const { return data_.size(); }
    void swap(MpArray& other) { data_.swap(other.data_); }

private:
    std::vector<__mpfr_struct> data_;
};

void set_alpha(const Environment& env, mpfr_ptr out) {
    if (env.rotation) {
        const BigRational mid = env.rotation->alpha.midpoint();
        mpfr_set_q(out, mid.backend().data(), MPFR_RNDN);
    } else {
        mpfr_set_d(out, env.alpha, MPFR_RNDN);
    }
}

/// f(y) = c_0 + 2 sum_{k>=1} Re(c_k e^{2 pi i k y}) at y given in MPFR.
void evaluate_mp(const PeriodicFunction& f, mpfr_srcptr y, mpfr_ptr out, mpfr_prec_t prec) {
    Mp angle(prec), s(prec), c(prec), two_pi(prec), term(prec);
    mpfr_const_pi(two_pi.get(), MPFR_RNDN);
    mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
    mpfr_set_d(out, f.mean(), MPFR_RNDN);
    for (int k = 1; k <= f.degree(); ++k) {
        const Complex ck = f.coefficient(k);
        if (ck == Complex(0.0, 0.0)) continue;
        mpfr_mul_si(angle.get(), y, k, MPFR_RNDN);
        mpfr_frac(angle.get(), angle.get(), MPFR_RNDN);
        mpfr_mul(angle.get(), angle.get(), two_pi.get(), MPFR_RNDN);
        mpfr_sin_cos(s.get(), c.get(), angle.get(), MPFR_RNDN);
        mpfr_mul_d(term.get(), c.get(), 2.0 * ck.real(), MPFR_RNDN);
        mpfr_add(out, out, term.get(), MPFR_RNDN);
        mpfr_mul_d(term.get(), s.get(), -2.0 * ck.imag(), MPFR_RNDN);
        mpfr_add(out, out, term.get(), MPFR_RNDN);
    }
}

/// Complex coefficients of a band-limited function in MPFR, k = 1..K.
struct MpSpectrum {
    MpArray re;
    MpArray im;
    MpSpectrum(std::size_t n, mpfr_prec_t prec) : re(n, prec), im(n, prec) {}
};

/// h_k = l_k / (e^{sign 2 pi i k alpha} - 1) times `scale_sign`, for the
/// symmetric (sign=+1, scale=+1) and asymmetric (sign=-1, scale=-1) equations.
MpSpectrum cohomology_mp(const PeriodicFunction& l, mpfr_srcptr alpha, int sign, int scale_sign, mpfr_prec_t prec) {
    const int K = l.degree();
    MpSpectrum h(static_cast<std::size_t>(K) + 1, prec);
    Mp two_pi(prec), angle(prec), s(prec), c(prec), dr(prec), di(prec), norm(prec), lr(prec), li(prec), t(prec);
    mpfr_const_pi(two_pi.get(), MPFR_RNDN);
    mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
    for (int k = 1; k <= K; ++k) {
        mpfr_mul_si(angle.get(), alpha, k, MPFR_RNDN);
        mpfr_frac(angle.get(), angle.get(), MPFR_RNDN);
        mpfr_mul(angle.get(), angle.get(), two_pi.get(), MPFR_RNDN);
        mpfr_sin_cos(s.get(), c.get(), angle.get(), MPFR_RNDN);
        // d = e^{sign i angle} - 1
        mpfr_sub_ui(dr.get(), c.get(), 1, MPFR_RNDN);
        mpfr_mul_si(di.get(), s.get(), sign, MPFR_RNDN);
        if (scale_sign < 0) {
            mpfr_neg(dr.get(), dr.get(), MPFR_RNDN);
            mpfr_neg(di.get(), di.get(), MPFR_RNDN);
        }
        mpfr_sqr(norm.get(), dr.get(), MPFR_RNDN);
        mpfr_sqr(t.get(), di.get(), MPFR_RNDN);
        mpfr_add(norm.get(), norm.get(), t.get(), MPFR_RNDN);
        if (mpfr_zero_p(norm.get())) throw Error(ErrorCode::Resonance, "exact resonance in extended solve");
        const Complex lk = l.coefficient(k);
        mpfr_set_d(lr.get(), lk.real(), MPFR_RNDN);
        mpfr_set_d(li.get(), lk.imag(), MPFR_RNDN);
        // (lr + i li)(dr - i di) / |d|^2
        mpfr_fmma(h.re[k], lr.get(), dr.get(), li.get(), di.get(), MPFR_RNDN);
        mpfr_fmms(h.im[k], li.get(), dr.get(), lr.get(), di.get(), MPFR_RNDN);
        mpfr_div(h.re[k], h.re[k], norm.get(), MPFR_RNDN);
        mpfr_div(h.im[k], h.im[k], norm.get(), MPFR_RNDN);
    }
    return h;
}

void evaluate_spectrum(const MpSpectrum& h, mpfr_srcptr y, mpfr_ptr out, mpfr_prec_t prec) {
    Mp two_pi(prec), angle(prec), s(prec), c(prec), t(prec);
    mpfr_const_pi(two_pi.get(), MPFR_RNDN);
    mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
    mpfr_set_zero(out, 1);
    for (std::size_t k = 1; k < h.re.size(); ++k) {
        mpfr_mul_ui(angle.get(), y, k, MPFR_RNDN);
        mpfr_frac(angle.get(), angle.get(), MPFR_RNDN);
        mpfr_mul(angle.get(), angle.get(), two_pi.get(), MPFR_RNDN);
        mpfr_sin_cos(s.get(), c.get(), angle.get(), MPFR_RNDN);
        mpfr_fmms(t.get(), h.re[k], c.get(), h.im[k], s.get(), MPFR_RNDN);
        mpfr_mul_2ui(t.get(), t.get(), 1, MPFR_RNDN);
        mpfr_add(out, out, t.get(), MPFR_RNDN);
    }
}

void require_log_odds(const Environment& env) {
    if (!env.log_odds) {
        throw Error(ErrorCode::PreconditionFailed, "extended precision needs an environment given by its log-odds");
    }
}

/// Unnormalized density values at the nodes i/Q; returns sum rho psi / sum rho.
void stationary_mean_mp(const Environment& env, const PeriodicFunction& psi, const ExtendedOptions& options,
                        mpfr_ptr out) {
    require_log_odds(env);
    const mpfr_prec_t prec = options.precision_bits;
    const PeriodicFunction& l = *env.log_odds;
    const double mean = l.mean();
    if (mean < 0.0) {
        stationary_mean_mp(mirror(env), psi.reflected(), options, out);
        return;
    }
    if (mean != 0.0 && mean < 1e-3) {
        throw Error(ErrorCode::PreconditionFailed, "log-odds mean must be exactly 0 or at least 1e-3 in modulus");
    }
    Mp alpha(prec);
    set_alpha(env, alpha.get());
    const int Q = options.quadrature_points;
    Mp y(prec), lv(prec), hv(prec), rho(prec), psi_v(prec), num(prec), den(prec), t(prec), u(prec);
    if (mean == 0.0) {
        // rho ~ e^h (1 + e^l), h(x+a) - h(x) = l(x)
        const MpSpectrum h = cohomology_mp(l, alpha.get(), +1, +1, prec);
        for (int i = 0; i < Q; ++i) {
            mpfr_set_si(y.get(), i, MPFR_RNDN);
            mpfr_div_si(y.get(), y.get(), Q, MPFR_RNDN);
            evaluate_mp(l, y.get(), lv.get(), prec);
            evaluate_spectrum(h, y.get(), hv.get(), prec);
            mpfr_exp(t.get(), lv.get(), MPFR_RNDN);
            mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDN);
            mpfr_exp(rho.get(), hv.get(), MPFR_RNDN);
            mpfr_mul(rho.get(), rho.get(), t.get(), MPFR_RNDN);
            evaluate_mp(psi, y.get(), psi_v.get(), prec);
            mpfr_fma(num.get(), rho.get(), psi_v.get(), num.get(), MPFR_RNDN);
            mpfr_add(den.get(), den.get(), rho.get(), MPFR_RNDN);
        }
    } else {
        // rho ~ eta g (1 + e^{-l}), h(x) - h(x-a) = l(x) - log lambda, g = e^h,
        // eta(x) = -sum_j lambda^{-j} / g(x + j a)
        const MpSpectrum h = cohomology_mp(l, alpha.get(), -1, -1, prec);
        Mp inv_lambda(prec), weight(prec), g_shift(prec), eta(prec), z(prec);
        mpfr_set_d(inv_lambda.get(), -mean, MPFR_RNDN);
        mpfr_exp(inv_lambda.get(), inv_lambda.get(), MPFR_RNDN);
        const int terms = static_cast<int>(std::ceil((prec + 16) * std::log(2.0) / mean)) + 1;
        for (int i = 0; i < Q; ++i) {
            mpfr_set_si(y.get(), i, MPFR_RNDN);
            mpfr_div_si(y.get(), y.get(), Q, MPFR_RNDN);
            mpfr_set_zero(eta.get(), 1);
            mpfr_set_ui(weight.get(), 1, MPFR_RNDN);
            for (int j = 0; j < terms; ++j) {
                mpfr_mul_si(z.get(), alpha.get(), j, MPFR_RNDN);
                mpfr_add(z.get(), z.get(), y.get(), MPFR_RNDN);
                evaluate_spectrum(h, z.get(), g_shift.get(), prec);
                mpfr_neg(g_shift.get(), g_shift.get(), MPFR_RNDN);
                mpfr_exp(g_shift.get(), g_shift.get(), MPFR_RNDN);
                mpfr_fms(eta.get(), weight.get(), g_shift.get(), eta.get(), MPFR_RNDN);
                mpfr_neg(eta.get(), eta.get(), MPFR_RNDN);
                mpfr_mul(weight.get(), weight.get(), inv_lambda.get(), MPFR_RNDN);
            }
            evaluate_mp(l, y.get(), lv.get(), prec);
            evaluate_spectrum(h, y.get(), hv.get(), prec);
            mpfr_neg(t.get(), lv.get(), MPFR_RNDN);
            mpfr_exp(t.get(), t.get(), MPFR_RNDN);
            mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDN);
            mpfr_exp(u.get(), hv.get(), MPFR_RNDN);
            mpfr_mul(rho.get(), u.get(), t.get(), MPFR_RNDN);
            mpfr_mul(rho.get(), rho.get(), eta.get(), MPFR_RNDN);
            evaluate_mp(psi, y.get(), psi_v.get(), prec);
            mpfr_fma(num.get(), rho.get(), psi_v.get(), num.get(), MPFR_RNDN);
            mpfr_add(den.get(), den.get(), rho.get(), MPFR_RNDN);
        }
    }
    mpfr_div(out, num.get(), den.get(), MPFR_RNDN);
}

std::string decimal(mpfr_srcptr v) {
    char* text = nullptr;
    mpfr_asprintf(&text, "%.60Rg", v);
    std::string out(text);
    mpfr_free_str(text);
    return out;
}

/// E_x psi(X_n) - nu at each requested n, in MPFR.
std::vector<double> gaps_mp(const Environment& env, double x, const PeriodicFunction& psi, const std::vector<int>& ns,
                            mpfr_srcptr nu, std::vector<double>& expectations, mpfr_prec_t prec) {
    const int n = *std::max_element(ns.begin(), ns.end());
    const std::size_t size = 2 * static_cast<std::size_t>(n) + 1;
    MpArray plus(size, prec), minus(size, prec), values(size, prec);
    {
        Mp alpha(prec), y(prec), lv(prec), t(prec);
        set_alpha(env, alpha.get());
        for (int m = -n; m <= n; ++m) {
            mpfr_mul_si(y.get(), alpha.get(), m, MPFR_RNDN);
            mpfr_add_d(y.get(), y.get(), x, MPFR_RNDN);
            evaluate_mp(*env.log_odds, y.get(), lv.get(), prec);
            const std::size_t i = static_cast<std::size_t>(m + n);
            // p = 1/(1 + e^{-l}), q = 1/(1 + e^{l})
            mpfr_neg(t.get(), lv.get(), MPFR_RNDN);
            mpfr_exp(t.get(), t.get(), MPFR_RNDN);
            mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDN);
            mpfr_ui_div(plus[i], 1, t.get(), MPFR_RNDN);
            mpfr_exp(t.get(), lv.get(), MPFR_RNDN);
            mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDN);
            mpfr_ui_div(minus[i], 1, t.get(), MPFR_RNDN);
            evaluate_mp(psi, y.get(), values[i], prec);
        }
    }
    MpArray current(size, prec), next(size, prec);
    mpfr_set_ui(current[n], 1, MPFR_RNDN);
    std::vector<double> gaps(ns.size(), 0.0);
    expectations.assign(ns.size(), 0.0);
    Mp acc(prec), diff(prec);
    auto record = [&](int k) {
        for (std::size_t r = 0; r < ns.size(); ++r) {
            if (ns[r] != k) continue;
            mpfr_set_zero(acc.get(), 1);
            for (int i = n - k; i <= n + k; i += 2) mpfr_fma(acc.get(), current[i], values[i], acc.get(), MPFR_RNDN);
            expectations[r] = mpfr_get_d(acc.get(), MPFR_RNDN);
            mpfr_sub(diff.get(), acc.get(), nu, MPFR_RNDN);
            gaps[r] = mpfr_get_d(diff.get(), MPFR_RNDN);
        }
    };
    record(0);
    const int last = static_cast<int>(size) - 1;
    for (int k = 1; k <= n; ++k) {
        for (int i = n - k; i <= n + k; i += 2) {
            if (i >= 1 && i < last) {
                mpfr_fmma(next[i], plus[i - 1], current[i - 1], minus[i + 1], current[i + 1], MPFR_RNDN);
            } else if (i == 0) {
                mpfr_mul(next[i], minus[1], current[1], MPFR_RNDN);
            } else {
                mpfr_mul(next[i], plus[i - 1], current[i - 1], MPFR_RNDN);
            }
        }
        current.swap(next);
        record(k);
    }
    return gaps;
}

}  // namespace

ExtendedValue stationary_mean_extended(const Environment& env, const PeriodicFunction& psi,
                                       const ExtendedOptions& options) {
    Mp nu(options.precision_bits);
    stationary_mean_mp(env, psi, options, nu.get());
    return {decimal(nu.get()), mpfr_get_d(nu.get(), MPFR_RNDN)};
}

std::vector<MixingCurve> mixing_curves_extended(const Environment& env, const std::vector<double>& starts,
                                                const PeriodicFunction& psi, const std::vector<int>& ns,
                                                std::optional<std::pair<int, int>> window,
                                                const ExtendedOptions& options, int cap, unsigned threads) {
    require_log_odds(env);
    if (ns.empty()) throw Error(ErrorCode::InvalidArgument, "empty step list");
    const int n_max = *std::max_element(ns.begin(), ns.end());
    if (n_max > cap) {
        throw Error(ErrorCode::CapExceeded,
                    "n = " + std::to_string(n_max) + " exceeds the exact step cap " + std::to_string(cap));
    }
    if (*std::min_element(ns.begin(), ns.end()) < 0) throw Error(ErrorCode::InvalidArgument, "negative step");
    Mp nu(options.precision_bits);
    stationary_mean_mp(env, psi, options, nu.get());
    const double nu_d = mpfr_get_d(nu.get(), MPFR_RNDN);
    std::vector<MixingCurve> curves(starts.size());
    const auto w = window.value_or(upper_half_window(ns));
    parallel_for(starts.size(), [&](std::size_t s) {
        std::vector<double> expectations;
        const std::vector<double> gaps = gaps_mp(env, starts[s], psi, ns, nu.get(), expectations, options.precision_bits);
        MixingCurve& curve = curves[s];
        curve.x = starts[s];
        curve.extended_precision = true;
        curve.nu_source = "density (extended precision)";
        for (std::size_t i = 0; i < ns.size(); ++i) curve.rows.push_back({ns[i], expectations[i], nu_d, gaps[i]});
        curve.fit = fit_loglog(ns, gaps, w.first, w.second);
    }, threads);
    return curves;
}

MixingCurve mixing_curve_extended(const Environment& env, double x, const PeriodicFunction& psi,
                                  const std::vector<int>& ns, std::optional<std::pair<int, int>> window,
                                  const ExtendedOptions& options, int cap) {
    return mixing_curves_extended(env, {x}, psi, ns, window, options, cap, 1).front();
}

}  // namespace evp
