#include "evp/cli/config.hpp"

#include "evp/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace evp::cli {

namespace {

Json int_list(std::initializer_list<int> v) { return Json(std::vector<int>(v)); }

Json dyadic(int lo, int hi) {
    std::vector<int> out;
    for (int n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
}

Json default_p() { return to_json(liouville_default_p()); }

std::vector<Field> common_fields() {
    return {
        {"seed", FieldKind::Integer, 0, "Philox key for every random stream"},
        {"threads", FieldKind::Integer, 0, "worker count, 0 = available parallelism"},
        {"precision_bits", FieldKind::Integer, static_cast<int>(kDefaultPrecisionBits), "working precision"},
        {"out_dir", FieldKind::String, "", "directory for output and manifest"},
        {"out", FieldKind::String, "", "output file name"},
        {"format", FieldKind::String, "json", "json or csv"},
    };
}

std::vector<Field> environment_fields() {
    return {
        {"alpha", FieldKind::NumberOrString, "golden", "rotation number, number or expression"},
        {"p_coefficients", FieldKind::Function, nullptr, "transition probability p"},
        {"log_odds_coefficients", FieldKind::Function, nullptr, "log(p/q); alternative to p_coefficients"},
        {"k_target", FieldKind::Integer, kDefaultKTarget, "truncation degree for transcendental operations"},
    };
}

CommandSchema make(std::string name, std::string summary, std::vector<Field> specific, bool environment) {
    CommandSchema s{std::move(name), std::move(summary), common_fields()};
    if (environment) {
        for (auto& f : environment_fields()) s.fields.push_back(std::move(f));
    }
    for (auto& f : specific) s.fields.push_back(std::move(f));
    return s;
}

const std::map<std::string, CommandSchema>& schemas() {
    static const std::map<std::string, CommandSchema> table = [] {
        std::map<std::string, CommandSchema> m;
        auto add = [&](CommandSchema s) { m.emplace(s.name, std::move(s)); };
        add(make("alpha", "continued fraction and Diophantine profile",
                 {{"value", FieldKind::NumberOrString, "golden", "rotation number expression"},
                  {"depth", FieldKind::Integer, 30, "partial quotients"},
                  {"gammas", FieldKind::NumberList, Json::array(), "build a Liouville schedule with these exponents"},
                  {"q_min", FieldKind::Integer, 2, "first denominator of the schedule"}},
                 false));
        add(make("cohomology", "solve phi(x+alpha) - phi(x) = psi",
                 {{"alpha", FieldKind::NumberOrString, "golden", "rotation number"},
                  {"psi", FieldKind::Function, nullptr, "right-hand side (required)"},
                  {"tol", FieldKind::Number, 1e-9, "asserted residual bound"},
                  {"r", FieldKind::Integer, 0, "derivative order for the norm ratio"},
                  {"m0", FieldKind::Integer, 2, "derivative loss"}},
                 false));
        add(make("density", "invariant density of T",
                 {{"tolerance", FieldKind::Number, 1e-9, "asserted stationarity residual"}}, true));
        add(make("poisson", "solve T phi - phi = psi (iterated to depth)",
                 {{"psi", FieldKind::Function, nullptr, "observable (required)"},
                  {"depth", FieldKind::Integer, 1, "number of iterated solves"},
                  {"tolerance", FieldKind::Number, 1e-9, "asserted residual bound"}},
                 true));
        add(make("mix", "exact mixing curve E_x psi(X_n) - nu(psi)",
                 {{"psi", FieldKind::Function, nullptr, "observable (required)"},
                  {"x", FieldKind::NumberList, Json::array({0.3}), "starting points"},
                  {"ns", FieldKind::IntList, dyadic(256, 8192), "step counts"},
                  {"window", FieldKind::IntList, Json::array(), "fit window [n_lo, n_hi]; default upper half"},
                  {"cap", FieldKind::Integer, kDefaultStepCap, "exact step cap"},
                  {"extended", FieldKind::String, "auto", "auto, on or off"},
                  {"cesaro_N", FieldKind::Integer, 4096, "Cesaro depth when no density exists"},
                  {"max_gap", FieldKind::Number, nullptr, "asserted bound on |gap| at the largest n"},
                  {"max_slope", FieldKind::Number, nullptr, "asserted bound on the fitted slope"}},
                 true));
        add(make("clt", "Monte Carlo CLT for N^{-1/2} sum psi(X_n)",
                 {{"psi", FieldKind::Function, nullptr, "observable (required)"},
                  {"N", FieldKind::Integer, 10000, "steps per trial"},
                  {"trials", FieldKind::Integer, 10000, "independent trials"},
                  {"variance_rtol", FieldKind::Number, 0.05, "asserted relative variance error"},
                  {"ks_max", FieldKind::Number, 0.02, "asserted Kolmogorov-Smirnov bound"}},
                 true));
        add(make("geomsum.delta", "finite differences of geometric-sum pmfs",
                 {{"s", FieldKind::Number, 0.5, "stay probability"},
                  {"ns", FieldKind::IntList, dyadic(64, 4096), "number of summands"},
                  {"ms", FieldKind::IntList, int_list({0, 1, 2}), "difference orders"},
                  {"max_ratio", FieldKind::Number, 2.0, "asserted max/min of the scaled sup per order"}},
                 false));
        add(make("geomsum.llt", "local limit error along a segment ladder",
                 {{"s", FieldKind::Number, 0.5, "constant stay probability"},
                  {"stay_coefficients", FieldKind::Function, nullptr, "stay probability along the orbit instead of s"},
                  {"alpha", FieldKind::NumberOrString, "golden", "rotation number for stay_coefficients"},
                  {"x", FieldKind::Number, 0.0, "first site"},
                  {"lengths", FieldKind::IntList, dyadic(8, 512), "segment lengths"},
                  {"max_error", FieldKind::Number, 0.05, "asserted scaled error at the longest segment"}},
                 false));
        add(make("geomsum.tail", "stopping-time tail P(|S_tau - n/2| > sqrt(n) ln n)",
                 {{"ns", FieldKind::IntList, dyadic(64, 4096), "levels n"},
                  {"p", FieldKind::Number, 0.5, "exit probability"},
                  {"method", FieldKind::String, "exact", "exact or mc"},
                  {"samples", FieldKind::Integer, 1000000, "Monte Carlo samples"},
                  {"min_r2", FieldKind::Number, 0.9, "asserted regression R^2"}},
                 false));
        add(make("liouville", "staged slow-mixing observable and witness table",
                 {{"stages", FieldKind::Integer, 2, "stages to build"},
                  {"q_min", FieldKind::Integer, 2, "first denominator"},
                  {"dp_cap", FieldKind::Integer, kDefaultStepCap, "exact step cap"},
                  {"cesaro_N", FieldKind::Integer, 4096, "Cesaro depth for the nu fallback"},
                  {"p_coefficients", FieldKind::Function, default_p(), "transition probability p"},
                  {"x", FieldKind::NumberList, Json::array(), "witness starts; default one per stage"},
                  {"samples", FieldKind::Integer, 20000, "Monte Carlo samples beyond the cap"}},
                 false));
        return m;
    }();
    return table;
}

bool matches(FieldKind kind, const Json& v) {
    switch (kind) {
        case FieldKind::Number: return v.is_number();
        case FieldKind::Integer: return v.is_number_integer();
        case FieldKind::String: return v.is_string();
        case FieldKind::Bool: return v.is_boolean();
        case FieldKind::NumberOrString: return v.is_number() || v.is_string();
        case FieldKind::Function: return v.is_object() || v.is_string();
        case FieldKind::NumberList:
            if (!v.is_array()) return false;
            for (const Json& e : v) {
                if (!e.is_number()) return false;
            }
            return true;
        case FieldKind::IntList:
            if (!v.is_array()) return false;
            for (const Json& e : v) {
                if (!e.is_number_integer()) return false;
            }
            return true;
    }
    return false;
}

const char* kind_name(FieldKind kind) {
    switch (kind) {
        case FieldKind::Number: return "a number";
        case FieldKind::Integer: return "an integer";
        case FieldKind::String: return "a string";
        case FieldKind::Bool: return "a boolean";
        case FieldKind::NumberOrString: return "a number or an expression string";
        case FieldKind::Function: return "a function object or a file path";
        case FieldKind::NumberList: return "a list of numbers";
        case FieldKind::IntList: return "a list of integers";
    }
    return "";
}

}  // namespace

const Field* CommandSchema::find(const std::string& key) const {
    for (const Field& f : fields) {
        if (f.name == key) return &f;
    }
    return nullptr;
}

std::vector<std::string> command_names() {
    std::vector<std::string> out;
    for (const auto& [name, schema] : schemas()) out.push_back(name);
    return out;
}

const CommandSchema& schema_for(const std::string& command) {
    const auto& m = schemas();
    const auto it = m.find(command);
    if (it == m.end()) throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
    return it->second;
}

Json validate_config(const std::string& command, const Json& config) {
    const CommandSchema& schema = schema_for(command);
    if (!config.is_object()) throw Error(ErrorCode::SchemaViolation, "configuration must be a JSON object");
    Json out = Json::object();
    for (const auto& [key, value] : config.items()) {
        const Field* f = schema.find(key);
        if (!f) throw Error(ErrorCode::SchemaViolation, "unknown key '" + key + "' for command '" + command + "'");
        if (value.is_null()) continue;
        Json v = value;
        // A single number is accepted where a list is expected.
        if ((f->kind == FieldKind::NumberList && v.is_number()) ||
            (f->kind == FieldKind::IntList && v.is_number_integer())) {
            v = Json::array({v});
        }
        if (!matches(f->kind, v)) {
            throw Error(ErrorCode::SchemaViolation, "key '" + key + "' must be " + kind_name(f->kind));
        }
        out[key] = v;
    }
    for (const Field& f : schema.fields) {
        if (!out.contains(f.name)) out[f.name] = f.default_value;
    }
    const std::string format = out["format"].get<std::string>();
    if (format != "json" && format != "csv") {
        throw Error(ErrorCode::SchemaViolation, "key 'format' must be json or csv");
    }
    // Canonical key order, so equal configurations print identically.
    Json ordered = Json::object();
    for (const Field& f : schema.fields) ordered[f.name] = out[f.name];
    return ordered;
}

void apply_environment_overrides(Json& config) {
    auto read = [](const char* name) -> std::optional<long> {
        const char* v = std::getenv(name);
        if (!v || !*v) return std::nullopt;
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (*end != '\0' || n < 0) {
            throw Error(ErrorCode::SchemaViolation, std::string(name) + " must be a non-negative integer");
        }
        return n;
    };
    if (const auto t = read("EVP_LAB_THREADS")) config["threads"] = *t;
    if (const auto b = read("EVP_LAB_PRECISION_BITS")) config["precision_bits"] = *b;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaViolation, "'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace evp::cli
