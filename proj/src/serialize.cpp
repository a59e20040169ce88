#include "evp/serialize.hpp"

#include "evp/errors.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace evp {

namespace {

Json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

Json optional_function(const std::optional<PeriodicFunction>& f) {
    if (!f) return nullptr;
    return to_json(*f);
}

std::string decimal(const BigInt& v) { return v.str(); }

Json intervals_json(const std::vector<Interval>& set) {
    Json out = Json::array();
    for (const Interval& iv : set) out.push_back({iv.lo, iv.hi});
    return out;
}

Json nu_json(const NuValue& v) { return {{"value", v.value}, {"error_bar", v.bar}, {"source", v.source}}; }

}  // namespace

Json to_json(const PeriodicFunction& f) {
    Json coeffs = Json::array();
    for (const Complex& c : f.coefficients()) coeffs.push_back({c.real(), c.imag()});
    return {{"degree", f.degree()}, {"coefficients", coeffs}};
}

PeriodicFunction function_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "function must be an object with degree and coefficients");
    for (const auto& [key, value] : j.items()) {
        if (key != "degree" && key != "coefficients") {
            throw Error(ErrorCode::SchemaViolation, "unknown key '" + key + "' in function");
        }
    }
    if (!j.contains("degree") || !j["degree"].is_number_integer()) {
        throw Error(ErrorCode::SchemaViolation, "function needs an integer 'degree'");
    }
    if (!j.contains("coefficients") || !j["coefficients"].is_array()) {
        throw Error(ErrorCode::SchemaViolation, "function needs a 'coefficients' array");
    }
    const long K = j["degree"].get<long>();
    const Json& arr = j["coefficients"];
    if (K < 0 || arr.size() != static_cast<std::size_t>(2 * K + 1)) {
        throw Error(ErrorCode::SchemaViolation, "'coefficients' must hold 2*degree+1 entries");
    }
    std::vector<Complex> c;
    c.reserve(arr.size());
    for (const Json& entry : arr) {
        if (entry.is_number()) {
            c.emplace_back(entry.get<double>(), 0.0);
        } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() && entry[1].is_number()) {
            c.emplace_back(entry[0].get<double>(), entry[1].get<double>());
        } else {
            throw Error(ErrorCode::SchemaViolation, "each coefficient must be [re, im] or a number");
        }
    }
    try {
        return PeriodicFunction(std::move(c));
    } catch (const Error& e) {
        throw Error(ErrorCode::SchemaViolation, e.what());
    }
}

Json to_json(const RotationNumber& rot) {
    Json pq = Json::array();
    for (const BigInt& a : rot.partial_quotients) pq.push_back(decimal(a));
    Json conv = Json::array();
    for (const Convergent& c : rot.convergents) conv.push_back({decimal(c.p), decimal(c.q)});
    PrecisionScope scope(rot.alpha.precision_bits);
    return {{"value", to_decimal_string(rot.alpha.value(), 40)},
            {"enclosure", {to_decimal_string(to_float(rot.alpha.lower), 40),
                           to_decimal_string(to_float(rot.alpha.upper), 40)}},
            {"precision_bits", rot.alpha.precision_bits},
            {"depth", rot.depth()},
            {"requested_depth", rot.requested_depth},
            {"exhausted", rot.exhausted},
            {"partial_quotients", pq},
            {"convergents", conv}};
}

Json to_json(const DiophantineProfile& profile) {
    return {{"c_est", number_or_null(profile.c_est)},
            {"tau_est", number_or_null(profile.tau_est)},
            {"m0", profile.m0},
            {"witness_depth", profile.witness_depth},
            {"liouville_like", profile.liouville_like},
            {"label", "empirical at depth " + std::to_string(profile.witness_depth)}};
}

Json to_json(const LiouvilleSchedule& schedule) {
    Json stages = Json::array();
    for (const LiouvilleStage& s : schedule.stages) {
        stages.push_back({{"n", s.index},
                          {"cf_index", s.cf_index},
                          {"p", decimal(s.p)},
                          {"q", decimal(s.q)},
                          {"gamma", s.gamma}});
    }
    return {{"alpha", to_json(schedule.alpha)},
            {"stages", stages},
            {"growth_enforced", schedule.growth_enforced},
            {"truncated", schedule.truncated},
            {"notice", schedule.notice}};
}

Json to_json(const SolveReport& report) {
    return {{"solution", to_json(report.solution)},
            {"residual_sup", report.residual_sup},
            {"smallest_denominator", number_or_null(report.smallest_denominator)},
            {"denominator_index", report.denominator_index},
            {"norm_ratio", number_or_null(report.norm_ratio)},
            {"series_discrepancy", number_or_null(report.series_discrepancy)}};
}

Json to_json(const Environment& env) {
    return {{"alpha", env.alpha},
            {"p", to_json(env.p)},
            {"log_odds", optional_function(env.log_odds)},
            {"epsilon_margin", env.epsilon_margin},
            {"symmetry", to_string(env.symmetry)},
            {"lambda", env.lambda},
            {"log_lambda", env.log_lambda},
            {"k_target", env.k_target}};
}

Json to_json(const InvariantDensity& density) {
    return {{"rho", to_json(density.rho)},
            {"construction", to_string(density.construction)},
            {"stationarity_residual", density.stationarity_residual},
            {"g", to_json(density.g)},
            {"eta", optional_function(density.eta)},
            {"inverse_weight", to_json(density.inverse_weight)},
            {"normalization", density.normalization},
            {"mirrored", density.mirrored},
            {"truncation_tail", density.truncation_tail},
            {"symmetric_defect", density.symmetric_defect}};
}

Json to_json(const PoissonCertificate& cert) {
    return {{"level", cert.level},
            {"branch", to_string(cert.branch)},
            {"phi", to_json(cert.phi)},
            {"psi", to_json(cert.psi)},
            {"g", to_json(cert.g)},
            {"eta", optional_function(cert.eta)},
            {"kappa", optional_function(cert.kappa)},
            {"residual_sup", cert.residual_sup},
            {"norm_ratio", number_or_null(cert.norm_ratio)},
            {"centering", cert.centering},
            {"mirrored", cert.mirrored}};
}

Json to_json(const MixingCurve& curve) {
    Json rows = Json::array();
    for (const MixingRow& r : curve.rows) {
        rows.push_back({{"n", r.n}, {"expectation", r.expectation}, {"nu_psi", r.nu}, {"gap", r.gap}});
    }
    return {{"x", curve.x},
            {"nu_source", curve.nu_source},
            {"extended_precision", curve.extended_precision},
            {"fit", {{"slope", number_or_null(curve.fit.slope)},
                     {"intercept", number_or_null(curve.fit.intercept)},
                     {"r2", number_or_null(curve.fit.r2)},
                     {"n_lo", curve.fit.n_lo},
                     {"n_hi", curve.fit.n_hi}}},
            {"rows", rows}};
}

Json to_json(const CltResult& result) {
    return {{"N", result.N},
            {"trials", result.trials},
            {"seed", result.seed},
            {"streams", {0, result.trials > 0 ? result.trials - 1 : 0}},
            {"mean", result.mean},
            {"variance", result.variance},
            {"sigma2", result.sigma2},
            {"ks", number_or_null(result.ks)},
            {"degenerate", result.degenerate}};
}

Json to_json(const DeltaTable& table) {
    return {{"n", table.n},
            {"m", table.m},
            {"j_min", table.j_min},
            {"sup", table.sup},
            {"scaled_sup", table.scaled_sup},
            {"values", table.values}};
}

Json to_json(const LltReport& report) {
    return {{"scaled_error", report.scaled_error},
            {"sigma", report.sigma},
            {"mean", report.mean},
            {"worst_j", report.worst_j}};
}

Json to_json(const TailFit& fit) {
    return {{"c", number_or_null(fit.c)}, {"b", number_or_null(fit.b)}, {"r2", number_or_null(fit.r2)}};
}

Json to_json(const CharModulus& modulus) {
    return {{"kappa_hat", modulus.kappa_hat},
            {"plateau", modulus.plateau},
            {"delta_hat", modulus.delta_hat},
            {"t", modulus.t},
            {"modulus", modulus.modulus}};
}

Json to_json(const LemmaCertificate& cert) {
    return {{"q", cert.q},
            {"p", decimal(cert.p)},
            {"gamma", cert.gamma},
            {"q_tilde", cert.q_tilde},
            {"x", cert.x},
            {"membership", cert.membership ? Json(to_string(*cert.membership)) : Json(nullptr)},
            {"worst_reach", cert.worst_reach},
            {"support_check", cert.support_check},
            {"expectation", cert.expectation ? Json(*cert.expectation) : Json(nullptr)},
            {"bound_holds", cert.bound_holds}};
}

Json to_json(const StageRecord& s) {
    return {{"n", s.n},
            {"p", decimal(s.p)},
            {"q", decimal(s.q)},
            {"gamma", s.gamma},
            {"q_tilde", s.q_tilde},
            {"candidate_amplitude", s.candidate_amplitude},
            {"amplitude", s.amplitude},
            {"approximation_ok", s.approximation_ok},
            {"growth_ok", s.growth_ok},
            {"support_ok", s.support_ok},
            {"side", to_string(s.side)},
            {"side_tie", s.side_tie},
            {"nu_candidate", nu_json(s.nu_candidate)},
            {"nu_previous", nu_json(s.nu_previous)},
            {"threshold", s.threshold},
            {"h_measure", s.h_measure},
            {"support_measure", s.support_measure},
            {"zeroed", s.zeroed},
            {"witness_measure", s.witness_measure},
            {"witness_set", intervals_json(s.witness_set)},
            {"grid_points", s.grid_points},
            {"evaluation", s.evaluation},
            {"propagation_error", s.propagation_error},
            {"spot_check_error", s.spot_check_error},
            {"min_margin", number_or_null(s.min_margin)},
            {"certified", s.certified},
            {"tail_bound", s.tail_bound},
            {"tail_ok", s.tail_ok}};
}

Json to_json(const SmoothnessProxy& proxy) {
    Json sums = Json::array();
    Json incs = Json::array();
    for (double v : proxy.log10_sum) sums.push_back(number_or_null(v));
    for (double v : proxy.log10_increment) incs.push_back(number_or_null(v));
    return {{"max_order", proxy.max_order},
            {"extrapolated_stages", proxy.extrapolated_stages},
            {"log10_partial_sum", sums},
            {"log10_last_increment", incs},
            {"converged", proxy.converged}};
}

Json to_json(const LiouvilleObservable& obs) {
    Json stages = Json::array();
    for (const StageRecord& s : obs.stages) stages.push_back(to_json(s));
    return {{"requested_stages", obs.requested_stages},
            {"completed_stages", obs.stages.size()},
            {"truncated", obs.truncated},
            {"notice", obs.notice},
            {"stages", stages},
            {"phi", to_json(obs.phi)},
            {"nu_phi", nu_json(obs.nu_phi)},
            {"smoothness", to_json(obs.smoothness)}};
}

Json to_json(const WitnessRow& row) {
    return {{"n", row.n},
            {"q_tilde", row.q_tilde},
            {"expectation", row.expectation},
            {"gap", row.gap},
            {"bound", row.bound},
            {"exact", row.exact},
            {"ci_half_width", row.ci_half_width},
            {"in_witness_set", row.in_witness_set},
            {"claimed", row.claimed},
            {"holds", row.holds}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw Error(ErrorCode::InvalidArgument, "CSV row width does not match header");
    rows.push_back(std::move(row));
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& out, const CsvTable& table, const std::string& manifest_digest) {
    if (table.units.size() != table.columns.size()) {
        throw Error(ErrorCode::InvalidArgument, "CSV units do not match header");
    }
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << csv_field(fields[i]);
        }
        out << "\r\n";
    };
    out << "# manifest sha256=" << manifest_digest << "\r\n";
    out << "# units";
    for (const std::string& u : table.units) out << ',' << csv_field(u);
    out << "\r\n";
    line(table.columns);
    for (const auto& row : table.rows) line(row);
}

}  // namespace evp
