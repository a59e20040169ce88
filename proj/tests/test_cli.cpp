#include "evp/cli/commands.hpp"
#include "evp/cli/config.hpp"
#include "evp/cli/manifest.hpp"
#include "evp/serialize.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace evp;
using evp::testing::code_of;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("evp_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int exit_code(const std::string& args) {
    const std::string cmd = std::string(EVP_LAB_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const Json kSmallDelta = {{"ns", {64, 128}}, {"ms", {0, 1}}};

}  // namespace

TEST(Config, UnknownKeyIsNamed) {
    try {
        cli::validate_config("density", Json{{"tolerence", 1e-9}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
        EXPECT_NE(std::string(e.what()).find("tolerence"), std::string::npos);
    }
}

TEST(Config, DefaultsAndScalarLists) {
    const Json c = cli::validate_config("geomsum.delta", Json{{"ns", 256}});
    EXPECT_EQ(c["ns"], Json::array({256}));
    EXPECT_EQ(c["s"].get<double>(), 0.5);
    EXPECT_EQ(c["ms"], Json::array({0, 1, 2}));
    EXPECT_EQ(c["format"], "json");
    EXPECT_EQ(c["seed"], 0);
    EXPECT_EQ(code_of([] { cli::validate_config("geomsum.delta", Json{{"ns", "many"}}); }), ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of([] { cli::validate_config("mix", Json{{"format", "xml"}}); }), ErrorCode::SchemaViolation);
    EXPECT_EQ(code_of([] { cli::validate_config("nosuch", Json::object()); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { cli::validate_config("mix", Json::array()); }), ErrorCode::SchemaViolation);
}

TEST(Config, EveryCommandValidatesEmptyConfig) {
    for (const auto& name : cli::command_names()) {
        const Json c = cli::validate_config(name, Json::object());
        EXPECT_EQ(c.size(), cli::schema_for(name).fields.size()) << name;
    }
}

TEST(Config, EnvironmentOverrides) {
    Json c = Json::object();
    ::setenv("EVP_LAB_THREADS", "3", 1);
    ::setenv("EVP_LAB_PRECISION_BITS", "256", 1);
    cli::apply_environment_overrides(c);
    EXPECT_EQ(c["threads"], 3);
    EXPECT_EQ(c["precision_bits"], 256);
    ::setenv("EVP_LAB_THREADS", "three", 1);
    EXPECT_EQ(code_of([&] { cli::apply_environment_overrides(c); }), ErrorCode::SchemaViolation);
    ::unsetenv("EVP_LAB_THREADS");
    ::unsetenv("EVP_LAB_PRECISION_BITS");
}

TEST(Csv, QuotingAndLayout) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
    std::ostringstream out;
    write_csv(out, CsvTable{{"n", "gap"}, {"steps", "psi units"}, {{"8", "0.5"}, {"16", "x,y"}}}, "abc");
    EXPECT_EQ(out.str(), "# manifest sha256=abc\r\n# units,steps,psi units\r\nn,gap\r\n8,0.5\r\n16,\"x,y\"\r\n");
}

TEST(Manifest, Sha256KnownAnswer) {
    EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(cli::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, DigestTracksConfigAndRoundTrips) {
    cli::Manifest m;
    m.command = "mix";
    m.config = cli::validate_config("mix", Json::object());
    const std::string d = m.digest();
    EXPECT_EQ(d.size(), 64u);
    EXPECT_EQ(cli::Manifest::from_json(m.to_json()).digest(), d);
    m.config["seed"] = 1;
    EXPECT_NE(m.digest(), d);
}

TEST(Run, CsvDocumentCarriesManifestDigest) {
    Json c = kSmallDelta;
    c["format"] = "csv";
    const auto r = cli::run("geomsum.delta", c, false);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.format, "csv");
    EXPECT_TRUE(r.output_path.empty());
    const std::string head = "# manifest sha256=" + r.manifest.digest() + "\r\n# units,";
    EXPECT_EQ(r.text.substr(0, head.size()), head);
    std::size_t lf = 0, crlf = 0;
    for (std::size_t i = 0; i < r.text.size(); ++i) {
        if (r.text[i] == '\n') {
            ++lf;
            crlf += i > 0 && r.text[i - 1] == '\r';
        }
    }
    EXPECT_EQ(lf, crlf);
    // two header lines, column names, one row per (n, m)
    EXPECT_EQ(lf, 3u + 4u);
}

TEST(Run, JsonDocumentShape) {
    const auto r = cli::run("geomsum.delta", kSmallDelta, false);
    const Json doc = Json::parse(r.text);
    EXPECT_EQ(doc["command"], "geomsum.delta");
    EXPECT_EQ(doc["manifest_sha256"], r.manifest.digest());
    EXPECT_TRUE(doc["passed"].get<bool>());
    EXPECT_TRUE(doc.contains("units"));
}

TEST(Run, ToleranceFailureIsReported) {
    Json c = kSmallDelta;
    c["max_ratio"] = 0.5;
    const auto r = cli::run("geomsum.delta", c, false);
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.failures.empty());
}

TEST(Run, WritesOutputsAndRerunIsIdentical) {
    const auto dir = scratch("rerun");
    Json c = kSmallDelta;
    c["out_dir"] = dir.string();
    c["format"] = "csv";
    const auto r = cli::run("geomsum.delta", c);
    ASSERT_FALSE(r.output_path.empty());
    EXPECT_EQ(slurp(r.output_path), r.text);
    const std::string manifest = r.output_path + ".manifest.json";
    ASSERT_TRUE(fs::exists(manifest));
    const Json mj = Json::parse(slurp(manifest));
    EXPECT_EQ(mj["outputs"][0]["sha256"], cli::sha256_hex(r.text));
    const auto again = cli::rerun(manifest);
    EXPECT_TRUE(again.identical);
    EXPECT_EQ(again.expected, again.actual);

    Json tampered = mj;
    tampered["outputs"][0]["sha256"] = std::string(64, '0');
    std::ofstream(dir / "tampered.json") << tampered.dump();
    EXPECT_FALSE(cli::rerun((dir / "tampered.json").string()).identical);
    fs::remove_all(dir);
}

TEST(Run, RandomOutputDeterministicAcrossThreadCounts) {
    Json c = {{"psi", to_json(PeriodicFunction::cosine(1))}, {"log_odds_coefficients", to_json(PeriodicFunction::cosine(1))},
              {"N", 200}, {"trials", 2000}, {"seed", 5},
              {"variance_rtol", 10.0}, {"ks_max", 1.0}};
    c["threads"] = 1;
    const auto one = cli::run("clt", c, false);
    c["threads"] = 3;
    const auto three = cli::run("clt", c, false);
    const Json a = Json::parse(one.text)["result"];
    const Json b = Json::parse(three.text)["result"];
    EXPECT_EQ(a, b);
}

TEST(Diagnostic, TagsErrors) {
    const Json d = cli::diagnostic(Error(ErrorCode::Resonance, "mode 4"));
    EXPECT_EQ(d["error"], "resonance");
    EXPECT_NE(d["message"].get<std::string>().find("mode 4"), std::string::npos);
    EXPECT_EQ(cli::diagnostic(std::runtime_error("x"))["error"], "internal");
}

TEST(Binary, ExitCodes) {
    const auto dir = scratch("exit");
    const std::string quiet = " > " + (dir / "out.txt").string() + " 2> " + (dir / "err.txt").string();
    EXPECT_EQ(exit_code("geomsum delta --n 64,128 --m 0" + quiet), 0);
    EXPECT_EQ(exit_code("geomsum delta --n 64,128 --m 0,1 --max-ratio 0.5" + quiet), 1);
    EXPECT_EQ(exit_code("geomsum delta --no-such-flag 3" + quiet), 2);
    EXPECT_EQ(Json::parse(slurp(dir / "err.txt"))["error"], "schema-violation");
    EXPECT_EQ(exit_code("geomsum delta --m 9" + quiet), 2);
    EXPECT_EQ(Json::parse(slurp(dir / "err.txt"))["error"], "order-too-high");
    EXPECT_EQ(exit_code("density --alpha golden --log-odds /nonexistent.json" + quiet), 2);
    EXPECT_EQ(exit_code("alpha --value 3/7" + quiet), 2);
    EXPECT_EQ(Json::parse(slurp(dir / "err.txt"))["error"], "rational-at-precision");
    fs::remove_all(dir);
}

TEST(Binary, CsvFlagAndRerun) {
    const auto dir = scratch("binary");
    const std::string quiet = " > " + (dir / "out.txt").string() + " 2>&1";
    ASSERT_EQ(exit_code("--out-dir " + dir.string() + " --csv delta.csv geomsum delta --n 64..256 --m 0" + quiet), 0);
    const std::string text = slurp(dir / "delta.csv");
    EXPECT_EQ(text.rfind("# manifest sha256=", 0), 0u);
    EXPECT_EQ(slurp(dir / "out.txt"), text);
    EXPECT_EQ(exit_code("rerun " + (dir / "delta.csv.manifest.json").string() + quiet), 0);
    EXPECT_TRUE(Json::parse(slurp(dir / "out.txt"))["identical"].get<bool>());
    fs::remove_all(dir);
}

TEST(Binary, ThreadsEnvironmentVariableReachesManifest) {
    const auto dir = scratch("threads");
    const std::string quiet = " > /dev/null 2>&1";
    ASSERT_EQ(exit_code("--out-dir " + dir.string() + " geomsum delta --n 64 --m 0" + quiet), 0);
    ASSERT_EQ(std::system(("EVP_LAB_THREADS=2 " + std::string(EVP_LAB_PATH) + " --out-dir " + dir.string() +
                           " --json t2.json geomsum delta --n 64 --m 0" + quiet)
                              .c_str()),
              0);
    const Json m = Json::parse(slurp(dir / "t2.json.manifest.json"));
    EXPECT_EQ(m["config"]["threads"], 2);
    fs::remove_all(dir);
}
