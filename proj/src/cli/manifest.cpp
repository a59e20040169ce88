#include "evp/cli/manifest.hpp"

#include "evp/errors.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace evp::cli {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::InvalidArgument, "SHA-256 computation failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

std::string Manifest::digest() const {
    Json j = {{"command", command}, {"config", config}, {"seeds", seeds}, {"version", version}, {"inputs", inputs}};
    return sha256_hex(j.dump());
}

Json Manifest::to_json() const {
    Json outs = Json::array();
    for (const OutputRecord& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    return {{"command", command}, {"config", config},   {"seeds", seeds},     {"version", version},
            {"inputs", inputs},   {"outputs", outs},    {"digest", digest()}};
}

Manifest Manifest::from_json(const Json& j) {
    Manifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.seeds = j.at("seeds");
        m.version = j.at("version").get<std::string>();
        m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
        for (const Json& o : j.at("outputs")) m.outputs.push_back({o.at("path"), o.at("sha256")});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("malformed manifest: ") + e.what());
    }
    return m;
}

}  // namespace evp::cli
