#pragma once

// Reproducibility records written next to every output file.

#include "evp/serialize.hpp"

#include <map>
#include <string>
#include <vector>

namespace evp::cli {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct OutputRecord {
    std::string path;
    std::string sha256;
};

struct Manifest {
    std::string command;
    Json config = Json::object();
    Json seeds = Json::object();
    std::string version = kVersion;
    std::map<std::string, std::string> inputs;  // path -> sha256
    std::vector<OutputRecord> outputs;

    /// Digest of everything that determines the outputs: command, config,
    /// seeds, version and input digests.
    std::string digest() const;
    Json to_json() const;
    static Manifest from_json(const Json& j);
};

}  // namespace evp::cli
