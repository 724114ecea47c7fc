// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace geodiv {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written next to every command's outputs.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> input_digests;   // path -> sha256
    std::map<std::string, std::string> output_digests;  // file name -> sha256
    std::uint64_t seed = 0;
    std::string version;
    std::string timestamp;  // UTC, ISO 8601

    /// sha256 over the canonical JSON of `config`.
    std::string config_digest() const;
    std::string to_json() const;
};

RunManifest make_manifest(std::string command, std::map<std::string, std::string> config,
                          const std::vector<std::filesystem::path>& inputs, std::uint64_t seed);

}  // namespace geodiv
