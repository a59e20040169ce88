#include "evp/cli/commands.hpp"

#include "evp/errors.hpp"
#include "evp/geomsum.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace evp::cli {

namespace {

struct Context {
    Json config;
    Manifest manifest;
    unsigned bits = kDefaultPrecisionBits;
    unsigned threads = 0;
};

struct Outcome {
    Json body = Json::object();
    std::optional<CsvTable> table;
    Json units = Json::object();
    std::vector<std::string> failures;
};

std::string num(double v) { return format_number(v); }

std::optional<PeriodicFunction> function_field(Context& ctx, const std::string& key) {
    const Json& v = ctx.config[key];
    if (v.is_null()) return std::nullopt;
    if (v.is_string()) {
        const std::string path = v.get<std::string>();
        ctx.manifest.inputs[path] = sha256_file(path);
        return function_from_json(load_json_file(path));
    }
    return function_from_json(v);
}

PeriodicFunction required_function(Context& ctx, const std::string& key) {
    auto f = function_field(ctx, key);
    if (!f) throw Error(ErrorCode::SchemaViolation, "key '" + key + "' is required");
    return *f;
}

std::string alpha_text(const Json& v) { return v.is_string() ? v.get<std::string>() : format_number(v.get<double>()); }

RotationNumber rotation_field(Context& ctx, const std::string& key) {
    const RealEnclosure enc = parse_alpha(alpha_text(ctx.config[key]), ctx.bits);
    return continued_fraction_max(enc, 4096);
}

Environment environment(Context& ctx) {
    const RotationNumber rot = rotation_field(ctx, "alpha");
    const int k_target = ctx.config["k_target"].get<int>();
    const auto p = function_field(ctx, "p_coefficients");
    const auto l = function_field(ctx, "log_odds_coefficients");
    if (p && l) throw Error(ErrorCode::SchemaViolation, "give either 'p_coefficients' or 'log_odds_coefficients'");
    if (l) {
        Environment env = classify_log_odds(rot.value(), *l, k_target);
        env.rotation = rot;
        return env;
    }
    if (!p) throw Error(ErrorCode::SchemaViolation, "key 'p_coefficients' or 'log_odds_coefficients' is required");
    return classify(rot, *p, k_target);
}

std::vector<int> int_list(const Json& v) { return v.get<std::vector<int>>(); }
std::vector<double> number_list(const Json& v) { return v.get<std::vector<double>>(); }

CsvTable coefficient_table(const PeriodicFunction& f, const std::string& label) {
    CsvTable t{{"function", "k", "re", "im"}, {"", "mode", "1", "1"}, {}};
    for (int k = 0; k <= f.degree(); ++k) {
        const Complex c = f.coefficient(k);
        t.add_row({label, std::to_string(k), num(c.real()), num(c.imag())});
    }
    return t;
}

Outcome run_alpha(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const std::vector<double> gammas = number_list(c["gammas"]);
    CsvTable t{{"k", "a_k", "p_k", "q_k"}, {"index", "1", "1", "1"}, {}};
    RotationNumber rot;
    if (!gammas.empty()) {
        LiouvilleOptions opts;
        opts.precision_bits = ctx.bits;
        const LiouvilleSchedule sched = liouville_alpha(gammas, c["q_min"].get<int>(), opts);
        out.body["schedule"] = to_json(sched);
        rot = sched.alpha;
    } else {
        rot = continued_fraction(parse_alpha(alpha_text(c["value"]), ctx.bits), c["depth"].get<int>());
    }
    out.body["rotation"] = to_json(rot);
    const Json rj = to_json(rot);
    out.body["partial_quotients"] = rj["partial_quotients"];
    out.body["convergents"] = rj["convergents"];
    if (rot.depth() >= 3) {
        const DiophantineProfile prof = diophantine_profile(rot);
        out.body["tau_est"] = prof.tau_est;
        out.body["c_est"] = prof.c_est;
        out.body["m0"] = prof.m0;
        out.body["profile"] = to_json(prof);
    }
    for (int k = 0; k < rot.depth(); ++k) {
        t.add_row({std::to_string(k + 1), rot.partial_quotients[k].str(), rot.convergents[k].p.str(),
                   rot.convergents[k].q.str()});
    }
    out.table = t;
    return out;
}

Outcome run_cohomology(Context& ctx) {
    Outcome out;
    const PeriodicFunction psi = required_function(ctx, "psi");
    CohomologyOptions opts;
    opts.r = ctx.config["r"].get<int>();
    opts.m0 = ctx.config["m0"].get<int>();
    const RotationNumber rot = rotation_field(ctx, "alpha");
    const SolveReport report = solve_rotation(psi, rot, opts);
    const double tol = ctx.config["tol"].get<double>();
    if (!(report.residual_sup < tol)) out.failures.push_back("residual " + num(report.residual_sup) + " >= " + num(tol));
    out.body = to_json(report);
    out.units = {{"residual_sup", "sup norm"}, {"smallest_denominator", "1"}};
    out.table = coefficient_table(report.solution, "phi");
    return out;
}

Outcome run_density(Context& ctx) {
    Outcome out;
    const Environment env = environment(ctx);
    const InvariantDensity d = invariant_density(env, std::numeric_limits<double>::infinity());
    const double tol = ctx.config["tolerance"].get<double>();
    if (!(d.stationarity_residual < tol)) {
        out.failures.push_back("stationarity residual " + num(d.stationarity_residual) + " >= " + num(tol));
    }
    out.body = {{"environment", to_json(env)}, {"density", to_json(d)}};
    out.units = {{"rho", "density w.r.t. Lebesgue"}, {"stationarity_residual", "sup norm"}};
    out.table = coefficient_table(d.rho, "rho");
    return out;
}

Outcome run_poisson(Context& ctx) {
    Outcome out;
    const Environment env = environment(ctx);
    const PeriodicFunction psi = required_function(ctx, "psi");
    const InvariantDensity d = invariant_density(env);
    PoissonOptions opts;
    opts.tolerance = std::numeric_limits<double>::infinity();
    const int depth = ctx.config["depth"].get<int>();
    const auto certs = solve_poisson_iterated(env, d, psi, depth, opts);
    const double tol = ctx.config["tolerance"].get<double>();
    Json list = Json::array();
    CsvTable t{{"level", "k", "re", "im", "residual_sup"}, {"", "mode", "1", "1", "sup norm"}, {}};
    for (const PoissonCertificate& cert : certs) {
        if (!(cert.residual_sup < tol)) {
            out.failures.push_back("level " + std::to_string(cert.level) + " residual " + num(cert.residual_sup) +
                                   " >= " + num(tol));
        }
        list.push_back(to_json(cert));
        for (int k = 0; k <= cert.phi.degree(); ++k) {
            const Complex c = cert.phi.coefficient(k);
            t.add_row({std::to_string(cert.level), std::to_string(k), num(c.real()), num(c.imag()),
                       num(cert.residual_sup)});
        }
    }
    out.body = {{"environment", to_json(env)},
                {"certificates", list},
                {"clt_variance", clt_variance(env, d.rho, certs.front().phi)}};
    out.units = {{"residual_sup", "sup norm"}, {"clt_variance", "psi units squared"}};
    out.table = t;
    return out;
}

Outcome run_mix(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const Environment env = environment(ctx);
    const PeriodicFunction psi = required_function(ctx, "psi");
    const std::vector<double> xs = number_list(c["x"]);
    const std::vector<int> ns = int_list(c["ns"]);
    if (xs.empty() || ns.empty()) throw Error(ErrorCode::SchemaViolation, "keys 'x' and 'ns' must be non-empty");
    std::optional<std::pair<int, int>> window;
    const std::vector<int> w = int_list(c["window"]);
    if (w.size() == 2) {
        window = std::make_pair(w[0], w[1]);
    } else if (!w.empty()) {
        throw Error(ErrorCode::SchemaViolation, "key 'window' must hold two integers");
    }
    const int cap = c["cap"].get<int>();
    const std::string mode = c["extended"].get<std::string>();
    if (mode != "auto" && mode != "on" && mode != "off") {
        throw Error(ErrorCode::SchemaViolation, "key 'extended' must be auto, on or off");
    }
    std::vector<MixingCurve> curves;
    if (mode == "on" || (mode == "auto" && env.log_odds)) {
        curves = mixing_curves_extended(env, xs, psi, ns, window, {}, cap, ctx.threads);
    } else {
        double nu = 0.0;
        std::string source = "density";
        try {
            nu = pairing(invariant_density(env).rho, psi);
        } catch (const Error&) {
            std::vector<double> starts;
            for (int i = 0; i < 8; ++i) starts.push_back(i / 8.0);
            nu = cesaro_nu(env, psi, c["cesaro_N"].get<int>(), starts, cap, ctx.threads).estimate;
            source = "cesaro";
        }
        for (double x : xs) {
            curves.push_back(mixing_curve(env, x, psi, nu, ns, window, cap));
            curves.back().nu_source = source;
        }
    }
    CsvTable t{{"x", "n", "expectation", "nu_psi", "gap", "fitted_slope"},
               {"circle", "steps", "psi units", "psi units", "psi units", "log gap per log n"},
               {}};
    Json list = Json::array();
    for (const MixingCurve& curve : curves) {
        list.push_back(to_json(curve));
        for (const MixingRow& r : curve.rows) {
            t.add_row({num(curve.x), std::to_string(r.n), num(r.expectation), num(r.nu), num(r.gap),
                       num(curve.fit.slope)});
        }
        if (!c["max_gap"].is_null()) {
            const double bound = c["max_gap"].get<double>();
            const double last = std::abs(curve.rows.back().gap);
            if (!(last < bound)) out.failures.push_back("x = " + num(curve.x) + ": gap " + num(last) + " >= " + num(bound));
        }
        if (!c["max_slope"].is_null()) {
            const double bound = c["max_slope"].get<double>();
            if (!(curve.fit.slope <= bound)) {
                out.failures.push_back("x = " + num(curve.x) + ": slope " + num(curve.fit.slope) + " > " + num(bound));
            }
        }
    }
    out.body = {{"curves", list}};
    out.units = {{"x", "circle"}, {"n", "steps"}, {"gap", "psi units"}};
    out.table = t;
    return out;
}

Outcome run_clt(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const Environment env = environment(ctx);
    const PeriodicFunction psi_raw = required_function(ctx, "psi");
    const InvariantDensity d = invariant_density(env);
    const PeriodicFunction psi = center(d.rho, psi_raw);
    const PoissonCertificate cert = solve_poisson(env, d, psi);
    const double sigma2 = clt_variance(env, d.rho, cert.phi);
    const auto seed = c["seed"].get<std::uint64_t>();
    const CltResult r = clt_experiment(env, d.rho, psi, sigma2, c["N"].get<int>(), c["trials"].get<int>(), seed,
                                       ctx.threads);
    ctx.manifest.seeds = {{"seed", seed}, {"streams", {0, std::max(0, r.trials - 1)}}, {"use", "one stream per trial"}};
    if (!c["variance_rtol"].is_null() && sigma2 > 0) {
        const double rel = std::abs(r.variance - sigma2) / sigma2;
        if (!(rel <= c["variance_rtol"].get<double>())) out.failures.push_back("variance relative error " + num(rel));
    }
    if (!c["ks_max"].is_null() && !(r.ks < c["ks_max"].get<double>())) {
        out.failures.push_back("Kolmogorov-Smirnov distance " + num(r.ks));
    }
    out.body = to_json(r);
    CsvTable t{{"N", "trials", "seed", "mean", "variance", "sigma2", "ks"},
               {"steps", "count", "", "psi units", "psi units squared", "psi units squared", "1"},
               {}};
    t.add_row({std::to_string(r.N), std::to_string(r.trials), std::to_string(r.seed), num(r.mean), num(r.variance),
               num(r.sigma2), num(r.ks)});
    out.units = {{"variance", "psi units squared"}, {"ks", "1"}};
    out.table = t;
    return out;
}

Outcome run_delta(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const double s = c["s"].get<double>();
    const double max_ratio = c["max_ratio"].get<double>();
    CsvTable t{{"n", "m", "sup", "scaled_sup"}, {"summands", "order", "probability", "probability * n^((m+1)/2)"}, {}};
    Json rows = Json::array();
    for (int m : int_list(c["ms"])) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (int n : int_list(c["ns"])) {
            const DeltaTable d = delta_table(s, n, m);
            lo = std::min(lo, d.scaled_sup);
            hi = std::max(hi, d.scaled_sup);
            t.add_row({std::to_string(n), std::to_string(m), num(d.sup), num(d.scaled_sup)});
            rows.push_back({{"n", n}, {"m", m}, {"sup", d.sup}, {"scaled_sup", d.scaled_sup}});
        }
        if (!(hi <= max_ratio * lo)) {
            out.failures.push_back("m = " + std::to_string(m) + ": scaled sup varies by " + num(hi / lo));
        }
    }
    out.body = {{"s", s}, {"rows", rows}};
    out.units = {{"sup", "probability"}, {"scaled_sup", "probability * n^((m+1)/2)"}};
    out.table = t;
    return out;
}

Outcome run_llt(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const auto stay = function_field(ctx, "stay_coefficients");
    double alpha = 0.0;
    if (stay) alpha = rotation_field(ctx, "alpha").value();
    const double x0 = c["x"].get<double>();
    const double s = c["s"].get<double>();
    CsvTable t{{"length", "T_W", "sigma_W", "scaled_error"}, {"sites", "steps", "steps", "1"}, {}};
    Json rows = Json::array();
    double last = 0.0;
    for (int L : int_list(c["lengths"])) {
        std::vector<double> stays(L, s);
        if (stay) {
            for (int j = 0; j < L; ++j) stays[j] = stay->evaluate(x0 + j * alpha);
        }
        const Segment seg = Segment::from_stays(stays);
        const LltReport r = llt_error(seg);
        last = r.scaled_error;
        t.add_row({std::to_string(L), num(seg.T_W), num(std::sqrt(seg.sigma2_W)), num(r.scaled_error)});
        Json row = to_json(r);
        row["length"] = L;
        rows.push_back(row);
    }
    const double bound = c["max_error"].get<double>();
    if (!(last < bound)) out.failures.push_back("scaled error " + num(last) + " at the longest segment");
    out.body = {{"rows", rows}};
    out.units = {{"scaled_error", "1"}, {"sigma", "steps"}};
    out.table = t;
    return out;
}

Outcome run_tail(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const double p = c["p"].get<double>();
    const std::string method = c["method"].get<std::string>();
    if (method != "exact" && method != "mc") throw Error(ErrorCode::SchemaViolation, "key 'method' must be exact or mc");
    const auto seed = c["seed"].get<std::uint64_t>();
    const auto samples = c["samples"].get<std::uint64_t>();
    const std::vector<int> ns = int_list(c["ns"]);
    CsvTable t{{"n", "probability", "ci_low", "ci_high"}, {"level", "probability", "probability", "probability"}, {}};
    Json rows = Json::array();
    std::vector<double> probs;
    for (int n : ns) {
        const std::vector<double> ps(static_cast<std::size_t>(n), p);
        TailEstimate e;
        if (method == "exact") {
            e.probability = stopping_tail_exact(ps, n);
            e.ci_low = e.ci_high = e.probability;
        } else {
            e = stopping_tail_mc(ps, n, samples, seed);
        }
        probs.push_back(e.probability);
        t.add_row({std::to_string(n), num(e.probability), num(e.ci_low), num(e.ci_high)});
        rows.push_back({{"n", n}, {"probability", e.probability}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}});
    }
    if (method == "mc") ctx.manifest.seeds = {{"seed", seed}, {"samples", samples}};
    const TailFit fit = fit_stopping_tail(ns, probs);
    if (!(fit.c > 0)) out.failures.push_back("fitted c = " + num(fit.c) + " is not positive");
    if (!(fit.r2 > c["min_r2"].get<double>())) out.failures.push_back("regression R^2 = " + num(fit.r2));
    out.body = {{"method", method}, {"rows", rows}, {"fit", to_json(fit)}};
    out.units = {{"probability", "probability"}, {"c", "per (ln n)^2"}};
    out.table = t;
    return out;
}

Outcome run_liouville(Context& ctx) {
    Outcome out;
    const Json& c = ctx.config;
    const int stages = c["stages"].get<int>();
    if (stages < 1) throw Error(ErrorCode::SchemaViolation, "key 'stages' must be at least 1");
    std::vector<double> gammas;
    for (int n = 1; n <= stages; ++n) gammas.push_back(n + 1.0);
    LiouvilleOptions lopts;
    lopts.precision_bits = ctx.bits;
    const LiouvilleSchedule sched = liouville_alpha(gammas, c["q_min"].get<int>(), lopts);
    const PeriodicFunction p = required_function(ctx, "p_coefficients");
    const Environment env = classify(sched.alpha, p);

    ObservableOptions oopts;
    oopts.stages = stages;
    oopts.cesaro_N = c["cesaro_N"].get<int>();
    oopts.dp_cap = c["dp_cap"].get<int>();
    oopts.threads = ctx.threads;
    const LiouvilleObservable obs = build_observable(env, oopts);

    Json lemmas = Json::array();
    for (const StageRecord& st : obs.stages) {
        const SupportSet set{st.q.convert_to<std::int64_t>(), st.side};
        const double x = set.center(0).convert_to<double>();
        const LemmaCertificate cert =
            lemma_certificate(env, set.q, st.p, st.gamma, x, oopts.dp_cap);
        if (!cert.support_check) out.failures.push_back("stage " + std::to_string(st.n) + ": support check failed");
        if (!cert.bound_holds) out.failures.push_back("stage " + std::to_string(st.n) + ": lemma bound failed");
        lemmas.push_back(to_json(cert));
        if (!st.certified) out.failures.push_back("stage " + std::to_string(st.n) + " not certified");
        if (!st.tail_ok) out.failures.push_back("stage " + std::to_string(st.n) + ": tail bound failed");
        if (!st.growth_ok) out.failures.push_back("stage " + std::to_string(st.n) + ": growth condition failed");
    }
    if (!obs.smoothness.converged) out.failures.push_back("smoothness proxy did not converge");

    std::vector<double> xs = number_list(c["x"]);
    if (xs.empty()) {
        for (const StageRecord& st : obs.stages) {
            if (!st.witness_set.empty()) {
                const Interval& iv = st.witness_set.front();
                const double mid = 0.5 * (iv.lo + iv.hi);
                xs.push_back(mid - std::floor(mid));
            }
        }
    }
    const auto seed = c["seed"].get<std::uint64_t>();
    const auto samples = c["samples"].get<std::uint64_t>();
    ctx.manifest.seeds = {{"seed", seed}, {"samples", samples}, {"use", "Monte Carlo rows beyond dp_cap"}};
    CsvTable t{{"x", "n", "q_tilde", "expectation", "gap", "bound", "exact", "in_witness_set", "claimed", "holds"},
               {"circle", "stage", "steps", "phi units", "phi units", "phi units", "", "", "", ""},
               {}};
    Json witness = Json::array();
    for (double x : xs) {
        const auto rows = slow_mixing_witness(env, obs, x, oopts.dp_cap, seed, samples);
        Json jr = Json::array();
        for (const WitnessRow& r : rows) {
            jr.push_back(to_json(r));
            t.add_row({num(x), std::to_string(r.n), std::to_string(r.q_tilde), num(r.expectation), num(r.gap),
                       num(r.bound), r.exact ? "true" : "false", r.in_witness_set ? "true" : "false",
                       r.claimed ? "true" : "false", r.holds ? "true" : "false"});
            if (r.claimed && !r.holds) {
                out.failures.push_back("x = " + num(x) + ", stage " + std::to_string(r.n) + ": gap below bound");
            }
        }
        witness.push_back({{"x", x}, {"rows", jr}});
    }
    out.body = {{"schedule", to_json(sched)},
                {"observable", to_json(obs)},
                {"lemma_certificates", lemmas},
                {"witness", witness}};
    out.units = {{"gap", "phi units"}, {"bound", "phi units"}, {"q_tilde", "steps"}};
    out.table = t;
    return out;
}

using Runner = std::function<Outcome(Context&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m = {
        {"alpha", run_alpha},         {"cohomology", run_cohomology},   {"density", run_density},
        {"poisson", run_poisson},     {"mix", run_mix},                 {"clt", run_clt},
        {"geomsum.delta", run_delta}, {"geomsum.llt", run_llt},         {"geomsum.tail", run_tail},
        {"liouville", run_liouville},
    };
    return m;
}

std::string output_path(const Json& config, const std::string& command, const std::string& format) {
    const std::string out = config["out"].get<std::string>();
    const std::string dir = config["out_dir"].get<std::string>();
    if (out.empty() && dir.empty()) return "";
    std::filesystem::path path = out.empty() ? std::filesystem::path(command + "." + format) : std::filesystem::path(out);
    if (!dir.empty() && path.is_relative()) path = std::filesystem::path(dir) / path;
    return path.string();
}

}  // namespace

RunResult run(const std::string& command, const Json& raw_config, bool write_files) {
    const auto& table = runners();
    const auto it = table.find(command);
    if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");

    Context ctx;
    ctx.config = validate_config(command, raw_config);
    ctx.bits = ctx.config["precision_bits"].get<unsigned>();
    if (ctx.bits < 64) throw Error(ErrorCode::SchemaViolation, "key 'precision_bits' must be at least 64");
    ctx.threads = ctx.config["threads"].get<unsigned>();
    ctx.manifest.command = command;
    ctx.manifest.config = ctx.config;
    ctx.manifest.seeds = {{"seed", ctx.config["seed"]}};

    Outcome outcome = it->second(ctx);

    RunResult result;
    result.format = ctx.config["format"].get<std::string>();
    result.failures = outcome.failures;
    result.passed = outcome.failures.empty();
    const std::string digest = ctx.manifest.digest();
    if (result.format == "csv") {
        if (!outcome.table) throw Error(ErrorCode::InvalidArgument, "command '" + command + "' has no CSV form");
        std::ostringstream text;
        write_csv(text, *outcome.table, digest);
        result.text = text.str();
    } else {
        Json doc = {{"command", command},
                    {"manifest_sha256", digest},
                    {"units", outcome.units},
                    {"passed", result.passed},
                    {"failures", result.failures},
                    {"result", outcome.body}};
        result.text = doc.dump(2) + "\n";
    }
    ctx.manifest.outputs.clear();
    const std::string path = output_path(ctx.config, command, result.format);
    if (!path.empty()) ctx.manifest.outputs.push_back({path, sha256_hex(result.text)});
    if (write_files && !path.empty()) {
        const std::filesystem::path p(path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream(path, std::ios::binary) << result.text;
        std::ofstream(path + ".manifest.json", std::ios::binary) << ctx.manifest.to_json().dump(2) << "\n";
        result.output_path = path;
    }
    result.manifest = ctx.manifest;
    return result;
}

RerunResult rerun(const std::string& manifest_path) {
    const Manifest m = Manifest::from_json(load_json_file(manifest_path));
    if (m.outputs.empty()) throw Error(ErrorCode::SchemaViolation, "manifest lists no outputs");
    for (const auto& [path, digest] : m.inputs) {
        if (sha256_file(path) != digest) {
            throw Error(ErrorCode::PreconditionFailed, "input '" + path + "' changed since the manifest was written");
        }
    }
    const RunResult r = run(m.command, m.config, false);
    RerunResult out;
    out.expected = m.outputs.front().sha256;
    out.actual = sha256_hex(r.text);
    out.identical = out.expected == out.actual;
    return out;
}

Json diagnostic(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return {{"error", error_tag(err->code())}, {"message", err->what()}};
    return {{"error", "internal"}, {"message", e.what()}};
}

}  // namespace evp::cli
