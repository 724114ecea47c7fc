// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geodiv/store.hpp"

namespace geodiv {

/// Configuration for the synthetic planted-cluster corpus generator.
///
/// Per rep_type, each topic gets a random unit high-resource center h. A
/// low-resource pair is centered on h unless listed in `divergent`, in which
/// case its center is cos(angle) h + sin(angle) u for a unit u orthogonal to
/// h. Pairs that share a (topic, group) share u. `toward` bends u toward
/// another topic's center instead of a random direction. `mirrors` copy
/// another pair's center verbatim. Images are center + noise * N(0, I).
struct SynthSpec {
    struct Rep {
        std::string name;
        std::size_t dim = 0;
    };
    struct Divergent {
        std::string topic;
        std::string country;
        double angle_deg = 0.0;
        std::string group;                // defaults to the country
        std::optional<std::string> toward;
        std::vector<std::string> reps;    // empty = every rep
    };
    struct Mirror {
        std::string topic;
        std::string country;
        std::string of_topic;
        std::string of_country;
    };
    struct CountOverride {
        std::string topic;
        std::string country;
        std::size_t images = 0;
    };

    std::vector<std::string> topics;
    std::vector<std::string> countries;
    std::vector<Rep> reps;

    /// Explicit low-resource pairs; empty means topics x countries.
    std::vector<PairKey> pairs;

    std::size_t images_per_pair = 20;
    /// When set, per-pair counts are drawn uniformly from [lo, hi].
    std::optional<std::pair<std::size_t, std::size_t>> images_per_pair_range;
    std::size_t high_images_per_topic = 40;
    double noise = 0.05;

    std::vector<CountOverride> overrides;
    std::vector<Divergent> divergent;
    std::vector<Mirror> mirrors;

    /// Throws ConfigError on zero counts, negative noise, unknown names.
    void validate() const;

    static SynthSpec from_json(std::string_view text);
    static SynthSpec load(const std::filesystem::path& path);
    std::string to_json() const;
};

/// Deterministic in (spec, seed). Every per-group draw comes from its own
/// stream, so output does not depend on generation order.
Store generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// Same records, before any store processing, in generation order.
std::vector<EmbeddingRecord> generate_synthetic_records(const SynthSpec& spec, std::uint64_t seed);

}  // namespace geodiv
