// SPDX-License-Identifier: Apache-2.0
#include "geodiv/topic_map.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "geodiv/error.hpp"

namespace geodiv {

std::string canonical_topic(std::string_view raw) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0, e = raw.size();
    while (b < e && is_space(raw[b])) ++b;
    while (e > b && is_space(raw[e - 1])) --e;
    std::string out(raw.substr(b, e - b));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

TopicMapConfig::TopicMapConfig(Entries renames, std::vector<std::string> drops, Entries hyponym_groups)
    : renames_(std::move(renames)), drops_(std::move(drops)), hyponyms_(std::move(hyponym_groups)) {
    build_index();
}

void TopicMapConfig::build_index() {
    rename_index_.clear();
    hyponym_index_.clear();
    drop_index_.clear();

    auto check_canonical = [](const std::string& name) {
        if (name.empty() || name != canonical_topic(name))
            throw ConfigError("topic map: canonical name '" + name + "' must be lowercase and trimmed");
    };

    // A raw name may appear once across renames and drops.
    std::set<std::string> seen;
    auto claim = [&](const std::string& raw) {
        const auto key = canonical_topic(raw);
        if (key.empty()) throw ConfigError("topic map: empty raw topic name");
        if (!seen.insert(key).second)
            throw ConfigError("topic map: raw name '" + key + "' appears in more than one rename/drop entry");
        return key;
    };

    for (const auto& [canonical, raws] : renames_) {
        check_canonical(canonical);
        for (const auto& raw : raws) rename_index_.emplace(claim(raw), canonical);
    }
    for (const auto& raw : drops_) drop_index_.emplace(claim(raw), true);

    std::set<std::string> seen_hyponyms;
    for (const auto& [abstract, raws] : hyponyms_) {
        check_canonical(abstract);
        for (const auto& raw : raws) {
            const auto key = canonical_topic(raw);
            if (key.empty()) throw ConfigError("topic map: empty hyponym name");
            if (!seen_hyponyms.insert(key).second)
                throw ConfigError("topic map: hyponym '" + key + "' mapped to more than one topic");
            hyponym_index_.emplace(key, abstract);
        }
    }
}

bool TopicMapConfig::is_dropped(std::string_view raw_topic) const {
    return drop_index_.contains(canonical_topic(raw_topic));
}

std::optional<std::string> TopicMapConfig::resolve(std::string_view raw_topic, Dataset dataset) const {
    const auto key = canonical_topic(raw_topic);
    if (drop_index_.contains(key)) return std::nullopt;
    if (auto it = rename_index_.find(key); it != rename_index_.end()) return it->second;
    if (dataset == Dataset::high_resource) {
        if (auto it = hyponym_index_.find(key); it != hyponym_index_.end()) return it->second;
    }
    return key;
}

namespace {

TopicMapConfig::Entries read_entries(const YAML::Node& node, const char* section) {
    TopicMapConfig::Entries out;
    if (!node) return out;
    if (!node.IsMap()) throw ConfigError(std::string("topic map: '") + section + "' must be a mapping");
    for (const auto& kv : node) {
        std::vector<std::string> raws;
        const auto& v = kv.second;
        if (v.IsScalar()) {
            raws.push_back(v.as<std::string>());
        } else if (v.IsSequence()) {
            for (const auto& item : v) raws.push_back(item.as<std::string>());
        } else {
            throw ConfigError(std::string("topic map: entries of '") + section + "' must be lists");
        }
        out.emplace_back(kv.first.as<std::string>(), std::move(raws));
    }
    return out;
}

}  // namespace

TopicMapConfig TopicMapConfig::from_yaml(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("topic map: ") + e.what());
    }
    if (root.IsNull()) return TopicMapConfig{};
    if (!root.IsMap()) throw ConfigError("topic map: top level must be a mapping");

    try {
        std::vector<std::string> drops;
        if (const auto d = root["drops"]) {
            if (!d.IsSequence()) throw ConfigError("topic map: 'drops' must be a list");
            for (const auto& item : d) drops.push_back(item.as<std::string>());
        }
        return TopicMapConfig(read_entries(root["renames"], "renames"), std::move(drops),
                              read_entries(root["hyponyms"], "hyponyms"));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("topic map: ") + e.what());
    }
}

TopicMapConfig TopicMapConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open topic map: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_yaml(ss.str());
}

std::string TopicMapConfig::to_yaml() const {
    YAML::Emitter out;
    out << YAML::BeginMap;
    auto emit_entries = [&](const char* name, const Entries& entries) {
        out << YAML::Key << name << YAML::Value << YAML::BeginMap;
        for (const auto& [k, vs] : entries) {
            out << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (const auto& v : vs) out << v;
            out << YAML::EndSeq;
        }
        out << YAML::EndMap;
    };
    emit_entries("renames", renames_);
    out << YAML::Key << "drops" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : drops_) out << d;
    out << YAML::EndSeq;
    emit_entries("hyponyms", hyponyms_);
    out << YAML::EndMap;
    return out.c_str();
}

}  // namespace geodiv
