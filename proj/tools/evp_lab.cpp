// evp-lab: command-line front end for the circle-walk experiments.

#include "evp/cli/commands.hpp"
#include "evp/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <memory>

namespace {

using evp::Json;
using evp::cli::FieldKind;

double parse_number(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw evp::Error(evp::ErrorCode::SchemaViolation, "key '" + key + "' expects a number, got '" + text + "'");
    }
    return v;
}

long parse_integer(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw evp::Error(evp::ErrorCode::SchemaViolation, "key '" + key + "' expects an integer, got '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

/// "8,16,...,512" continues the pattern of the two entries before "..."
/// (geometric when their ratio is an integer > 1, else arithmetic);
/// "64..4096" is a doubling ladder.
std::vector<long> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<long> out;
    const auto range = text.find("..");
    if (range != std::string::npos && text.find("...") == std::string::npos && text.find(',') == std::string::npos) {
        const long lo = parse_integer(text.substr(0, range), key);
        const long hi = parse_integer(text.substr(range + 2), key);
        if (lo < 1 || hi < lo) throw evp::Error(evp::ErrorCode::SchemaViolation, "bad range for key '" + key + "'");
        for (long n = lo; n <= hi; n *= 2) out.push_back(n);
        return out;
    }
    const auto parts = split(text, ',');
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] != "...") {
            out.push_back(parse_integer(parts[i], key));
            continue;
        }
        if (out.size() < 2 || i + 1 >= parts.size()) {
            throw evp::Error(evp::ErrorCode::SchemaViolation, "'...' in key '" + key + "' needs two entries before and one after");
        }
        const long a = out[out.size() - 2];
        const long b = out.back();
        const long end = parse_integer(parts[i + 1], key);
        const bool geometric = a > 0 && b % a == 0 && b / a > 1;
        if (!geometric && b <= a) {
            throw evp::Error(evp::ErrorCode::SchemaViolation, "'...' in key '" + key + "' needs an increasing pattern");
        }
        for (long next = geometric ? b * (b / a) : b + (b - a); next < end;
             next = geometric ? next * (b / a) : next + (b - a)) {
            out.push_back(next);
        }
    }
    return out;
}

Json parse_value(FieldKind kind, const std::string& text, const std::string& key) {
    switch (kind) {
        case FieldKind::Number: return parse_number(text, key);
        case FieldKind::Integer: return parse_integer(text, key);
        case FieldKind::String: return text;
        case FieldKind::Bool:
            if (text == "true" || text == "1") return true;
            if (text == "false" || text == "0") return false;
            throw evp::Error(evp::ErrorCode::SchemaViolation, "key '" + key + "' expects true or false");
        case FieldKind::NumberOrString: {
            try {
                return parse_number(text, key);
            } catch (const evp::Error&) {
                return text;
            }
        }
        case FieldKind::Function:
            if (!text.empty() && text.front() == '{') {
                try {
                    return Json::parse(text);
                } catch (const nlohmann::json::parse_error& e) {
                    throw evp::Error(evp::ErrorCode::SchemaViolation, "key '" + key + "': " + e.what());
                }
            }
            return text;
        case FieldKind::NumberList: {
            Json arr = Json::array();
            for (const auto& part : split(text, ',')) arr.push_back(parse_number(part, key));
            return arr;
        }
        case FieldKind::IntList: return parse_int_list(text, key);
    }
    return nullptr;
}

const std::map<std::string, std::vector<std::string>> kAliases = {
    {"p_coefficients", {"--p"}},
    {"log_odds_coefficients", {"--log-odds"}},
    {"tolerance", {"--tol"}},
    {"ns", {"--n"}},
    {"ms", {"--m"}},
};

bool is_common(const std::string& name) {
    return name == "seed" || name == "threads" || name == "precision_bits" || name == "out_dir" || name == "out" ||
           name == "format";
}

struct Bound {
    std::string command;
    CLI::App* app = nullptr;
    std::map<std::string, std::pair<CLI::Option*, std::shared_ptr<std::string>>> options;
};

Bound bind_command(CLI::App& parent, const std::string& name, const std::string& command) {
    const auto& schema = evp::cli::schema_for(command);
    Bound b;
    b.command = command;
    b.app = parent.add_subcommand(name, schema.summary);
    for (const auto& field : schema.fields) {
        if (is_common(field.name)) continue;
        auto store = std::make_shared<std::string>();
        std::string names = "--" + field.name;
        std::string dashed = field.name;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        if (dashed != field.name) names += ",--" + dashed;
        if (const auto it = kAliases.find(field.name); it != kAliases.end()) {
            for (const auto& a : it->second) {
                if (!b.app->get_option_no_throw(a)) names += "," + a;
            }
        }
        CLI::Option* opt = b.app->add_option(names, *store, field.help);
        b.options[field.name] = {opt, store};
    }
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walks on the circle driven by an irrational rotation: solvers, mixing and slow-mixing experiments",
                 "evp-lab"};
    app.require_subcommand(1);
    app.fallthrough();

    long seed = 0;
    long threads = 0;
    long precision_bits = 0;
    std::string out_dir;
    std::string config_path;
    std::string env_path;
    std::string json_path;
    std::string csv_path;
    app.add_option("--seed", seed, "random seed");
    app.add_option("--threads", threads, "worker threads (0 = all)");
    app.add_option("--precision-bits", precision_bits, "working precision in bits");
    app.add_option("--out-dir", out_dir, "directory for outputs and manifests");
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--env", env_path, "JSON environment file (alpha, p_coefficients, ...)");
    auto* json_opt = app.add_option("--json", json_path, "JSON output, optionally to a file")->expected(0, 1);
    auto* csv_opt = app.add_option("--csv", csv_path, "CSV output, optionally to a file")->expected(0, 1);
    json_opt->excludes(csv_opt);

    std::vector<Bound> bound;
    for (std::string name : {"alpha", "cohomology", "density", "poisson", "mix", "clt", "liouville"}) {
        bound.push_back(bind_command(app, name, name));
    }
    auto* geomsum = app.add_subcommand("geomsum", "geometric sums: delta, llt or tail");
    geomsum->require_subcommand(1);
    geomsum->fallthrough();
    for (std::string name : {"delta", "llt", "tail"}) bound.push_back(bind_command(*geomsum, name, "geomsum." + name));

    std::string manifest_path;
    auto* rerun_app = app.add_subcommand("rerun", "re-execute a manifest and compare output digests");
    rerun_app->add_option("manifest", manifest_path, "manifest file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << Json{{"error", "schema-violation"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }

    try {
        if (rerun_app->parsed()) {
            const auto r = evp::cli::rerun(manifest_path);
            std::cout << Json{{"identical", r.identical}, {"expected", r.expected}, {"actual", r.actual}}.dump(2) << "\n";
            return r.identical ? 0 : 1;
        }
        const Bound* chosen = nullptr;
        for (const Bound& b : bound) {
            if (b.app->parsed()) chosen = &b;
        }
        if (!chosen) throw evp::Error(evp::ErrorCode::InvalidArgument, "no command given");
        const auto& schema = evp::cli::schema_for(chosen->command);

        Json config = Json::object();
        if (!config_path.empty()) {
            config = evp::cli::load_json_file(config_path);
            if (!config.is_object()) throw evp::Error(evp::ErrorCode::SchemaViolation, "configuration must be an object");
        }
        if (!env_path.empty()) {
            const Json env = evp::cli::load_json_file(env_path);
            if (!env.is_object()) throw evp::Error(evp::ErrorCode::SchemaViolation, "environment file must be an object");
            for (const auto& [key, value] : env.items()) config[key == "tol" ? "tolerance" : key] = value;
        }
        for (const auto& [key, entry] : chosen->options) {
            if (entry.first->count() == 0) continue;
            config[key] = parse_value(schema.find(key)->kind, *entry.second, key);
        }
        if (app.get_option("--seed")->count()) config["seed"] = seed;
        if (app.get_option("--threads")->count()) config["threads"] = threads;
        if (app.get_option("--precision-bits")->count()) config["precision_bits"] = precision_bits;
        if (!out_dir.empty()) config["out_dir"] = out_dir;
        if (csv_opt->count()) {
            config["format"] = "csv";
            if (!csv_path.empty()) config["out"] = csv_path;
        }
        if (json_opt->count()) {
            config["format"] = "json";
            if (!json_path.empty()) config["out"] = json_path;
        }
        evp::cli::apply_environment_overrides(config);

        const auto result = evp::cli::run(chosen->command, config);
        std::cout << result.text;
        for (const auto& f : result.failures) std::cerr << "tolerance failed: " << f << "\n";
        return result.passed ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << evp::cli::diagnostic(e).dump() << "\n";
        return 2;
    }
}
