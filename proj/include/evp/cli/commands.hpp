#pragma once

// Subcommand execution shared by the evp-lab tool and the tests.

#include "evp/cli/config.hpp"
#include "evp/cli/manifest.hpp"

#include <string>
#include <vector>

namespace evp::cli {

struct RunResult {
    bool passed = true;                 // every asserted tolerance held
    std::vector<std::string> failures;  // one line per failed tolerance
    std::string format;                 // "json" or "csv"
    std::string text;                   // the primary output document
    Manifest manifest;
    std::string output_path;            // empty when nothing was written
};

/// Validates `config`, runs the command and, when `write_files` is set and
/// the config names an output, writes the document and its manifest.
RunResult run(const std::string& command, const Json& config, bool write_files = true);

struct RerunResult {
    bool identical = false;
    std::string expected;
    std::string actual;
};

/// Re-executes a manifest without writing and compares the output digest.
RerunResult rerun(const std::string& manifest_path);

/// {"error": tag, "message": text}
Json diagnostic(const std::exception& e);

}  // namespace evp::cli
