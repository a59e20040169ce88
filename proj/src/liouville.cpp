#include "evp/liouville.hpp"

#include "evp/errors.hpp"
#include "evp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evp {

namespace {

constexpr double kSqrtTwo = 1.4142135623730951;
constexpr double kRounding = 1e-12;

BigInt floor_rational(const BigRational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    BigInt quotient = num / den;
    if (quotient * den != num && num < 0) quotient -= 1;
    return quotient;
}

BigRational frac_rational(const BigRational& r) { return r - BigRational(floor_rational(r)); }

std::int64_t to_int64(const BigInt& v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw Error(ErrorCode::CapExceeded, std::string(what) + " does not fit in 64 bits");
    }
    return v.convert_to<std::int64_t>();
}

/// floor(q^{gamma-1}).
BigInt q_tilde_of(const BigInt& q, double gamma) {
    const double e = gamma - 1.0;
    if (e == std::floor(e) && e >= 0 && e < 4096) return boost::multiprecision::pow(q, static_cast<unsigned>(e));
    PrecisionScope scope(256);
    return BigInt(floor(pow(BigFloat(q), BigFloat(e))));
}

/// max |q a - p| over the enclosure and the double value used by the walk.
BigRational max_deviation(const Environment& env, std::int64_t q, const BigInt& p) {
    const RealEnclosure enc = alpha_enclosure(env);
    const BigRational qr(q);
    const BigRational pr(p);
    BigRational worst = abs(qr * enc.lower - pr);
    for (const BigRational& a : {enc.upper, BigRational(env.alpha)}) {
        const BigRational d = abs(qr * a - pr);
        if (d > worst) worst = d;
    }
    return worst;
}

bool nonzero(const PeriodicFunction& f) {
    for (const Complex& c : f.coefficients()) {
        if (c != Complex(0.0, 0.0)) return true;
    }
    return false;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t g = 1;
    while (g < n) g <<= 1;
    return g;
}

/// Index i/G lies in the arc union iff 16 q i - 8 s G mod 16 G is within G of 0.
bool grid_in_set(std::int64_t q, Side side, std::int64_t i, std::int64_t G) {
    const std::int64_t period = 16 * G;
    std::int64_t t = 16 * q * i - (side == Side::Minus ? 8 * G : 0);
    t %= period;
    if (t < 0) t += period;
    return t < G || t > period - G;
}

std::vector<Interval> runs_to_intervals(const std::vector<std::int64_t>& indices, std::int64_t G) {
    std::vector<Interval> out;
    const double h = 1.0 / static_cast<double>(G);
    std::size_t start = 0;
    for (std::size_t i = 1; i <= indices.size(); ++i) {
        if (i == indices.size() || indices[i] != indices[i - 1] + 1) {
            out.push_back({(static_cast<double>(indices[start]) - 0.5) * h,
                           (static_cast<double>(indices[i - 1]) + 0.5) * h});
            start = i;
        }
    }
    return out;
}

bool in_intervals(const std::vector<Interval>& set, double x) {
    const double y = x - std::floor(x);
    for (const Interval& iv : set) {
        for (double shift : {-1.0, 0.0, 1.0}) {
            if (y + shift >= iv.lo && y + shift <= iv.hi) return true;
        }
    }
    return false;
}

struct NuContext {
    std::optional<InvariantDensity> density;
    std::string density_failure;
};

NuValue estimate_nu(const Environment& env, const NuContext& ctx, const PeriodicFunction& psi, double amplitude,
                    const ObservableOptions& options, const std::string& label) {
    if (!nonzero(psi)) return {0.0, 0.0, "exact"};
    const double required = 0.1 * amplitude;
    if (ctx.density) {
        NuValue v{pairing(ctx.density->rho, psi),
                  std::max(ctx.density->stationarity_residual, kRounding) * psi.coefficient_l1(), "density"};
        if (v.bar < required) return v;
    }
    std::vector<double> starts;
    for (int i = 0; i < 8; ++i) starts.push_back(i / 8.0);
    const CesaroEstimate ce = cesaro_nu(env, psi, options.cesaro_N, starts, options.dp_cap, options.threads);
    NuValue v{ce.estimate, ce.spread, "cesaro"};
    if (v.bar < required) return v;
    const double depth = std::ceil(options.cesaro_N * v.bar / required);
    std::ostringstream msg;
    msg << "nu(" << label << ") error bar " << v.bar << " is not below 10% of the amplitude " << amplitude
        << "; Cesaro depth N >= " << depth << " required";
    throw Error(ErrorCode::NuResolution, msg.str());
}

/// E_x f(X_n) by exact DP at each x.
std::vector<double> dp_values(const Environment& env, const PeriodicFunction& f, const std::vector<double>& xs, int n,
                              int cap, unsigned threads) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = expectation(evolve_exact(env, xs[i], n, cap), f); },
                 threads);
    return out;
}

}  // namespace

std::string to_string(Side s) { return s == Side::Plus ? "+" : "-"; }

BigRational SupportSet::radius() const { return BigRational(1, 16 * q); }

BigRational SupportSet::center(std::int64_t j) const {
    BigRational c(j, q);
    if (side == Side::Minus) c += BigRational(1, 2 * q);
    return c;
}

BigRational SupportSet::measure() const { return BigRational(2 * q) * radius(); }

std::vector<Interval> SupportSet::intervals() const {
    std::vector<Interval> out;
    const double r = radius().convert_to<double>();
    for (std::int64_t j = 0; j < q; ++j) {
        const double c = center(j).convert_to<double>();
        out.push_back({c - r, c + r});
    }
    return out;
}

BigRational SupportSet::scaled_offset(double x) const {
    BigRational v = BigRational(q) * BigRational(x);
    if (side == Side::Minus) v -= BigRational(1, 2);
    return v - BigRational(floor_rational(v + BigRational(1, 2)));
}

bool SupportSet::contains(double x) const { return abs(scaled_offset(x)) < BigRational(1, 16); }

std::vector<double> SupportSet::grid(int per_arc) const {
    std::vector<double> out;
    const BigRational width = 2 * radius() / per_arc;
    for (std::int64_t j = 0; j < q; ++j) {
        const BigRational lo = center(j) - radius();
        for (int i = 0; i < per_arc; ++i) {
            const BigRational x = lo + width * BigRational(2 * i + 1, 2);
            out.push_back(frac_rational(x).convert_to<double>());
        }
    }
    return out;
}

std::pair<SupportSet, SupportSet> support_sets(std::int64_t q) {
    if (q < 1) throw Error(ErrorCode::InvalidArgument, "support sets need q >= 1");
    return {SupportSet{q, Side::Plus}, SupportSet{q, Side::Minus}};
}

RealEnclosure alpha_enclosure(const Environment& env) {
    if (env.rotation) return env.rotation->alpha;
    return RealEnclosure::exact_value(BigRational(env.alpha));
}

bool lemma_support_holds(const Environment& env, std::int64_t q, const BigInt& p, std::int64_t q_tilde) {
    return BigRational(1, 16) + BigRational(q_tilde) * max_deviation(env, q, p) <= BigRational(1, 8);
}

LemmaCertificate lemma_certificate(const Environment& env, std::int64_t q, const BigInt& p, double gamma, double x,
                                   int cap) {
    if (q < 1) throw Error(ErrorCode::InvalidArgument, "q must be positive");
    if (gamma < 2.0) throw Error(ErrorCode::InvalidArgument, "gamma must be at least 2");
    if (!approximation_inequality_holds(alpha_enclosure(env), p, BigInt(q), gamma)) {
        std::ostringstream msg;
        msg << "|q alpha - p| < 1/(16 q^gamma) fails for q = " << q << ", p = " << p << ", gamma = " << gamma;
        throw Error(ErrorCode::PreconditionFailed, msg.str());
    }
    LemmaCertificate cert;
    cert.q = q;
    cert.p = p;
    cert.gamma = gamma;
    cert.q_tilde = to_int64(q_tilde_of(BigInt(q), gamma), "q_tilde");
    cert.x = x;
    const auto [plus, minus] = support_sets(q);
    const BigRational deviation = max_deviation(env, q, p);
    std::optional<BigRational> offset;
    if (plus.contains(x)) {
        cert.membership = Side::Plus;
        offset = plus.scaled_offset(x);
    } else if (minus.contains(x)) {
        cert.membership = Side::Minus;
        offset = minus.scaled_offset(x);
    }
    if (offset) {
        const BigRational reach = abs(*offset) + BigRational(cert.q_tilde) * deviation;
        cert.worst_reach = reach.convert_to<double>();
        cert.support_check = reach < BigRational(1, 8);
    }
    if (cert.q_tilde <= cap) {
        const LatticeDistribution dist = evolve_exact(env, x, static_cast<int>(cert.q_tilde), cap);
        // cos(2 pi q (x + m alpha)) = cos(2 pi (frac(q x) + m (q alpha - p)))
        const double base = frac_rational(BigRational(q) * BigRational(x)).convert_to<double>();
        const double eps = (BigRational(q) * BigRational(env.alpha) - BigRational(p)).convert_to<double>();
        double sum = 0.0;
        const int radius = dist.radius();
        for (int m = -radius; m <= radius; ++m) {
            const double w = dist.at(m);
            if (w == 0.0) continue;
            sum += w * std::cos(kTwoPi * (base + m * eps));
        }
        cert.expectation = sum;
        if (cert.membership == Side::Plus) cert.bound_holds = sum > kSqrtTwo / 2;
        if (cert.membership == Side::Minus) cert.bound_holds = sum < -kSqrtTwo / 2;
    } else {
        cert.bound_holds = cert.membership.has_value() && cert.support_check;
    }
    return cert;
}

Propagated propagate(const Environment& env, const PeriodicFunction& f, int steps, int max_degree) {
    if (steps < 0) throw Error(ErrorCode::InvalidArgument, "negative step count");
    const PeriodicFunction p = env.p;
    const int dp = p.degree();
    const int final_degree = std::min(max_degree, f.degree() + dp * steps);
    const std::vector<double> phases =
        env.rotation ? rotation_phases(*env.rotation, final_degree) : rotation_phases(env.alpha, final_degree);
    std::vector<Complex> plus_phase(final_degree + 1);
    for (int k = 0; k <= final_degree; ++k) plus_phase[k] = unit_phase(phases[k]);

    int K = std::min(f.degree(), max_degree);
    Propagated out;
    for (int k = K + 1; k <= f.degree(); ++k) out.dropped += 2.0 * std::abs(f.coefficient(k));
    std::vector<Complex> c(2 * K + 1);
    for (int k = -K; k <= K; ++k) c[k + K] = f.coefficient(k);

    std::vector<Complex> t, d, next;
    for (int step = 0; step < steps; ++step) {
        // T f = t + p * d with t_m = c_m e(-m alpha), d_m = c_m (e(m alpha) - e(-m alpha))
        t.assign(2 * K + 1, Complex());
        d.assign(2 * K + 1, Complex());
        for (int m = -K; m <= K; ++m) {
            const Complex e = m >= 0 ? plus_phase[m] : std::conj(plus_phase[-m]);
            t[m + K] = c[m + K] * std::conj(e);
            d[m + K] = c[m + K] * (e - std::conj(e));
        }
        const int full = K + dp;
        const int newK = std::min(full, max_degree);
        next.assign(2 * newK + 1, Complex());
        for (int k = 0; k <= full; ++k) {
            Complex v = (k <= K) ? t[k + K] : Complex();
            const int jlo = std::max(-dp, k - K);
            const int jhi = std::min(dp, k + K);
            for (int j = jlo; j <= jhi; ++j) v += p.coefficient(j) * d[k - j + K];
            if (k <= newK) {
                next[k + newK] = v;
                if (k > 0) next[newK - k] = std::conj(v);
            } else {
                out.dropped += 2.0 * std::abs(v);
            }
        }
        next[newK] = Complex(next[newK].real(), 0.0);
        c.swap(next);
        K = newK;
    }
    out.function = PeriodicFunction::hermitian_part(std::move(c));
    return out;
}

PeriodicFunction liouville_default_p() { return PeriodicFunction::constant(0.5) + PeriodicFunction::cosine(1, 0.25); }

SmoothnessProxy smoothness_proxy(const std::vector<StageRecord>& stages, int max_order) {
    SmoothnessProxy proxy;
    proxy.max_order = max_order;
    proxy.log10_sum.assign(max_order + 1, -std::numeric_limits<double>::infinity());
    proxy.log10_increment.assign(max_order + 1, -std::numeric_limits<double>::infinity());
    if (stages.empty()) {
        proxy.converged = true;
        return proxy;
    }
    const double ln10 = std::log(10.0);
    const double ln_two_pi = std::log(kTwoPi);
    auto accumulate = [&](int n, double L, bool candidate_only, double amplitude) {
        for (int r = 0; r <= max_order; ++r) {
            double log_term;
            if (candidate_only || amplitude > 0.0) {
                log_term = -std::sqrt(n + 1.0) * L + r * (ln_two_pi + L);
            } else {
                log_term = -std::numeric_limits<double>::infinity();
            }
            const double s = proxy.log10_sum[r] * ln10;
            const double hi = std::max(s, log_term);
            const double combined =
                std::isinf(hi) && hi < 0 ? hi : hi + std::log(std::exp(s - hi) + std::exp(log_term - hi));
            proxy.log10_sum[r] = combined / ln10;
            proxy.log10_increment[r] = log_term / ln10;
        }
    };
    double L = 0.0;
    int n = 0;
    for (const StageRecord& s : stages) {
        n = s.n;
        {
            PrecisionScope scope(128);
            L = static_cast<double>(log(BigFloat(s.q)));
        }
        accumulate(n, L, false, s.amplitude);
    }
    // Smallest compatible continuation: the convergent after q_n is at least 16 q_n^{n+1}.
    const double limit = std::log10(1e-6);
    for (int extra = 0; extra < 64; ++extra) {
        L = std::log(16.0) + (n + 1) * L;
        ++n;
        accumulate(n, L, true, 0.0);
        ++proxy.extrapolated_stages;
        const bool small = std::all_of(proxy.log10_increment.begin(), proxy.log10_increment.end(),
                                       [&](double v) { return v < limit; });
        if (small && std::sqrt(n + 1.0) > max_order) {
            proxy.converged = true;
            break;
        }
        if (!std::isfinite(L)) break;
    }
    return proxy;
}

LiouvilleObservable build_observable(const Environment& env, const ObservableOptions& options) {
    if (!env.rotation) {
        throw Error(ErrorCode::StageInfeasible, "the construction needs a certified continued fraction of alpha");
    }
    if (options.stages < 1) throw Error(ErrorCode::InvalidArgument, "at least one stage is required");
    const RotationNumber& rot = *env.rotation;
    const RealEnclosure enc = alpha_enclosure(env);

    LiouvilleObservable obs;
    obs.requested_stages = options.stages;

    NuContext ctx;
    try {
        ctx.density = invariant_density(env);
    } catch (const Error& e) {
        ctx.density_failure = e.what();
    }

    PeriodicFunction psi;  // psi_{n-1}
    NuValue nu_psi{0.0, 0.0, "exact"};
    int next_index = 0;
    BigInt q_prev = 0;

    for (int n = 1; n <= options.stages; ++n) {
        const double gamma = n + 1.0;
        std::optional<int> found;
        for (int k = next_index; k < rot.depth(); ++k) {
            const Convergent& c = rot.convergents[k];
            if (c.q <= q_prev) continue;
            if (!approximation_inequality_holds(enc, c.p, c.q, gamma)) continue;
            if (n > 1 && !growth_condition_holds(q_prev, c.q, n)) continue;
            found = k;
            break;
        }
        if (!found) {
            if (n == 1) {
                throw Error(ErrorCode::StageInfeasible,
                            "no certified convergent satisfies |q alpha - p| < 1/(16 q^2); alpha is not "
                            "Liouville-like at this depth");
            }
            obs.truncated = true;
            obs.notice = "stage " + std::to_string(n) + " has no admissible convergent; observable truncated at " +
                         std::to_string(n - 1) + " stages";
            break;
        }
        const Convergent& conv = rot.convergents[*found];
        const BigInt qt_big = q_tilde_of(conv.q, gamma);
        if (qt_big > options.dp_cap) {
            obs.truncated = true;
            std::ostringstream msg;
            msg << "stage " << n << " needs q_tilde = " << qt_big << " steps, beyond the cap " << options.dp_cap
                << "; observable truncated at " << n - 1 << " stages";
            obs.notice = msg.str();
            break;
        }

        StageRecord st;
        st.n = n;
        st.p = conv.p;
        st.q = conv.q;
        st.gamma = gamma;
        st.q_tilde = to_int64(qt_big, "q_tilde");
        const std::int64_t q = to_int64(conv.q, "q");
        if (q > std::numeric_limits<int>::max() / 4) throw Error(ErrorCode::CapExceeded, "q too large for a mode index");
        st.approximation_ok = true;
        st.growth_ok = n == 1 || growth_condition_holds(q_prev, conv.q, n);
        st.support_ok = lemma_support_holds(env, q, conv.p, st.q_tilde);
        st.candidate_amplitude = std::pow(static_cast<double>(q), -std::sqrt(gamma));
        st.threshold = kSqrtTwo / 4 * st.candidate_amplitude;
        const PeriodicFunction candidate = PeriodicFunction::cosine(static_cast<int>(q), st.candidate_amplitude);

        st.nu_candidate = estimate_nu(env, ctx, candidate, st.candidate_amplitude, options, "candidate");
        st.nu_previous = nu_psi;
        st.side_tie = std::abs(st.nu_candidate.value) <= 2 * st.nu_candidate.bar;
        st.side = st.nu_candidate.value >= 0 ? Side::Minus : Side::Plus;

        // Grid over the whole circle fine enough for points_per_arc and the propagated degree.
        const int steps = static_cast<int>(st.q_tilde);
        const int degree_needed = std::max(psi.degree(), static_cast<int>(q)) + env.p.degree() * steps;
        std::size_t G = std::max<std::size_t>(options.min_grid, next_pow2(8 * static_cast<std::size_t>(q) *
                                                                          options.points_per_arc));
        G = std::max(G, next_pow2(2 * static_cast<std::size_t>(degree_needed) + 2));
        const int max_degree = static_cast<int>(G / 2) - 1;

        const Propagated prev_prop = propagate(env, psi, steps, max_degree);
        const Propagated cand_prop = propagate(env, candidate, steps, max_degree);
        const std::vector<double> prev_vals = prev_prop.function.sample(G);
        const std::vector<double> cand_vals = cand_prop.function.sample(G);

        std::vector<std::int64_t> in_set, in_h, rest;
        const auto sG = static_cast<std::int64_t>(G);
        for (std::int64_t i = 0; i < sG; ++i) {
            if (!grid_in_set(q, st.side, i, sG)) continue;
            in_set.push_back(i);
            const double gap = prev_vals[i] - nu_psi.value;
            const bool h = st.side == Side::Minus ? gap >= st.threshold : gap <= -st.threshold;
            (h ? in_h : rest).push_back(i);
        }
        st.h_measure = static_cast<double>(in_h.size()) / static_cast<double>(G);
        st.support_measure = SupportSet{q, st.side}.measure().convert_to<double>();
        st.zeroed = 2 * in_h.size() >= in_set.size();
        st.amplitude = st.zeroed ? 0.0 : st.candidate_amplitude;
        const std::vector<std::int64_t>& chosen = st.zeroed ? in_h : rest;
        st.witness_set = runs_to_intervals(chosen, sG);
        st.witness_measure = static_cast<double>(chosen.size()) / static_cast<double>(G);

        const PeriodicFunction psi_n = st.zeroed ? psi : psi + candidate;
        NuValue nu_n = nu_psi;
        if (!st.zeroed) {
            nu_n.value += st.nu_candidate.value;
            nu_n.bar += st.nu_candidate.bar;
            if (nu_psi.source == "exact") nu_n.source = st.nu_candidate.source;
        }

        // Certify |E_x psi_n(X_qtilde) - nu(psi_n)| >= threshold on the witness grid.
        std::vector<double> xs;
        for (std::int64_t i : chosen) xs.push_back(static_cast<double>(i) / static_cast<double>(G));
        st.grid_points = static_cast<int>(xs.size());
        std::vector<double> values;
        const double work = static_cast<double>(xs.size()) * static_cast<double>(steps) * steps;
        if (work <= 4e9) {
            st.evaluation = "exact-dp";
            values = dp_values(env, psi_n, xs, steps, options.dp_cap, options.threads);
        } else {
            st.evaluation = "propagated";
            st.propagation_error = prev_prop.dropped + (st.zeroed ? 0.0 : cand_prop.dropped);
            for (std::int64_t i : chosen) values.push_back(prev_vals[i] + (st.zeroed ? 0.0 : cand_vals[i]));
            std::vector<double> spot;
            std::vector<double> spot_expected;
            const std::size_t count = std::min<std::size_t>(16, xs.size());
            for (std::size_t s = 0; s < count; ++s) {
                const std::size_t idx = s * xs.size() / count;
                spot.push_back(xs[idx]);
                spot_expected.push_back(values[idx]);
            }
            const std::vector<double> spot_vals = dp_values(env, psi_n, spot, steps, options.dp_cap, options.threads);
            for (std::size_t s = 0; s < spot.size(); ++s) {
                st.spot_check_error = std::max(st.spot_check_error, std::abs(spot_vals[s] - spot_expected[s]));
            }
        }
        st.min_margin = std::numeric_limits<double>::infinity();
        for (double v : values) {
            const double margin =
                std::abs(v - nu_n.value) - nu_n.bar - st.threshold - st.propagation_error - kRounding;
            st.min_margin = std::min(st.min_margin, margin);
        }
        st.certified = !xs.empty() && st.min_margin > 0.0 && st.spot_check_error <= 1e-9 && st.support_ok &&
                       st.growth_ok && 2 * chosen.size() >= in_set.size();

        obs.stages.push_back(std::move(st));
        psi = psi_n;
        nu_psi = nu_n;
        q_prev = conv.q;
        next_index = *found + 1;
    }

    // Tail perturbation bound: later amplitudes decay at least by the factor 0.001.
    for (std::size_t i = 0; i < obs.stages.size(); ++i) {
        StageRecord& s = obs.stages[i];
        double tail = obs.stages.back().candidate_amplitude * 0.001 / 0.999;
        for (std::size_t j = i + 1; j < obs.stages.size(); ++j) tail += obs.stages[j].candidate_amplitude;
        s.tail_bound = 2 * tail;
        s.tail_ok = s.tail_bound <= 0.003 * s.candidate_amplitude;
    }
    if (!obs.truncated && ctx.density_failure.size() && obs.notice.empty()) {
        obs.notice = "density unavailable (" + ctx.density_failure + "); nu from Cesaro averages";
    }
    obs.phi = psi;
    obs.nu_phi = nu_psi;
    obs.smoothness = smoothness_proxy(obs.stages);
    return obs;
}

WitnessRow witness_row(const Environment& env, const LiouvilleObservable& obs, std::size_t stage, double x, int cap,
                       std::uint64_t seed, std::uint64_t samples) {
    const StageRecord& st = obs.stages.at(stage);
    WitnessRow row;
    row.n = st.n;
    row.q_tilde = st.q_tilde;
    row.bound = 0.3 * std::pow(static_cast<double>(st.q_tilde), -std::sqrt(st.n + 1.0) / st.n);
    row.in_witness_set = in_intervals(st.witness_set, x);
    const bool trivial = !nonzero(obs.phi);
    if (st.q_tilde <= cap) {
        row.exact = true;
        row.expectation = expectation(evolve_exact(env, x, static_cast<int>(st.q_tilde), cap), obs.phi);
    } else {
        row.exact = false;
        const int n = static_cast<int>(std::min<std::int64_t>(st.q_tilde, std::numeric_limits<int>::max()));
        std::vector<double> values(samples);
        parallel_for(samples, [&](std::size_t s) {
            const PathSample path = sample_path(env, x, n, seed, s);
            values[s] = obs.phi.evaluate(x + path.offsets.back() * env.alpha);
        });
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(samples);
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= std::max<double>(1.0, static_cast<double>(samples) - 1.0);
        row.expectation = mean;
        row.ci_half_width = 1.96 * std::sqrt(var / static_cast<double>(samples));
    }
    row.gap = trivial ? 0.0 : std::abs(row.expectation - obs.nu_phi.value);
    row.claimed = row.in_witness_set && !trivial;
    row.holds = row.claimed && row.gap - obs.nu_phi.bar - row.ci_half_width >= row.bound;
    return row;
}

std::vector<WitnessRow> slow_mixing_witness(const Environment& env, const LiouvilleObservable& obs, double x, int cap,
                                            std::uint64_t seed, std::uint64_t samples) {
    std::vector<WitnessRow> rows;
    for (std::size_t i = 0; i < obs.stages.size(); ++i) rows.push_back(witness_row(env, obs, i, x, cap, seed, samples));
    return rows;
}

}  // namespace evp
