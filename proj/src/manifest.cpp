// SPDX-License-Identifier: Apache-2.0
#include "geodiv/manifest.hpp"

#include <chrono>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "geodiv/error.hpp"

namespace geodiv {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw IoError("sha256: init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx_, data, n) != 1) throw IoError("sha256: update failed");
    }
    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, md, &len) != 1) throw IoError("sha256: final failed");
        std::string out;
        out.reserve(2 * len);
        for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
    Sha256 h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

std::string RunManifest::config_digest() const { return sha256_hex(nlohmann::json(config).dump()); }

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = version;
    j["timestamp"] = timestamp;
    j["seed"] = seed;
    j["config"] = config;
    j["config_digest"] = config_digest();
    j["inputs"] = input_digests;
    j["outputs"] = output_digests;
    return j.dump(2) + "\n";
}

RunManifest make_manifest(std::string command, std::map<std::string, std::string> config,
                          const std::vector<std::filesystem::path>& inputs, std::uint64_t seed) {
    RunManifest m;
    m.command = std::move(command);
    m.config = std::move(config);
    m.seed = seed;
    m.version = GEODIV_VERSION;
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    m.timestamp = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
    for (const auto& p : inputs) m.input_digests[p.string()] = sha256_file(p);
    return m;
}

}  // namespace geodiv
