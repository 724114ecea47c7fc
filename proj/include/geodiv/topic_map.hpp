// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geodiv/types.hpp"

namespace geodiv {

/// Lowercases and trims surrounding whitespace.
std::string canonical_topic(std::string_view raw);

/// Static topic normalization: renames, dropped (subjective) topics and
/// hyponym groups that map high-resource labels onto abstract topics.
///
/// Renames and drops apply to every record. Hyponym groups apply only to
/// high-resource records, whose labels come from a finer-grained taxonomy.
class TopicMapConfig {
public:
    using Entries = std::vector<std::pair<std::string, std::vector<std::string>>>;

    TopicMapConfig() = default;
    TopicMapConfig(Entries renames, std::vector<std::string> drops, Entries hyponym_groups);

    /// Parses the YAML key-list form. Throws ConfigError.
    static TopicMapConfig from_yaml(std::string_view text);
    static TopicMapConfig load(const std::filesystem::path& path);

    /// nullopt when the topic is dropped.
    std::optional<std::string> resolve(std::string_view raw_topic, Dataset dataset) const;

    bool is_dropped(std::string_view raw_topic) const;

    const Entries& renames() const noexcept { return renames_; }
    const std::vector<std::string>& drops() const noexcept { return drops_; }
    const Entries& hyponym_groups() const noexcept { return hyponyms_; }

    std::string to_yaml() const;

private:
    void build_index();

    Entries renames_;
    std::vector<std::string> drops_;
    Entries hyponyms_;

    std::map<std::string, std::string, std::less<>> rename_index_;
    std::map<std::string, std::string, std::less<>> hyponym_index_;
    std::map<std::string, bool, std::less<>> drop_index_;
};

}  // namespace geodiv
