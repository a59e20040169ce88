#pragma once

// Per-command configuration schemas. A configuration is one JSON object;
// command-line flags and config files both produce it.

#include "evp/serialize.hpp"

#include <string>
#include <vector>

namespace evp::cli {

enum class FieldKind { Number, Integer, String, Bool, NumberList, IntList, Function, NumberOrString };

struct Field {
    std::string name;
    FieldKind kind;
    Json default_value;  // null: optional without default
    std::string help;
};

struct CommandSchema {
    std::string name;
    std::string summary;
    std::vector<Field> fields;

    const Field* find(const std::string& key) const;
};

std::vector<std::string> command_names();
const CommandSchema& schema_for(const std::string& command);

/// Fills defaults and checks types. Unknown keys raise SchemaViolation naming
/// the key. Function fields may be inline objects or file paths.
Json validate_config(const std::string& command, const Json& config);

/// EVP_LAB_THREADS and EVP_LAB_PRECISION_BITS replace the corresponding keys.
void apply_environment_overrides(Json& config);

Json load_json_file(const std::string& path);

}  // namespace evp::cli
