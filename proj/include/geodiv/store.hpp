// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geodiv/topic_map.hpp"
#include "geodiv/types.hpp"

namespace geodiv {

/// A (topic, country) pair present under some rep_types but not all of them.
struct CoverageGap {
    PairKey pair;
    std::vector<std::string> present_in;
    std::vector<std::string> absent_in;
};

/// Immutable, validated collection of embedding records.
///
/// Records are kept sorted by (rep_type, dataset, topic, country, image_id) and
/// every group index lists members in image_id order, so downstream reductions
/// see a fixed summation order. All const members are safe to call
/// concurrently.
class Store {
public:
    Store() = default;

    /// Applies the topic map, then validates: country iff low-resource, finite
    /// nonzero vectors, one dimension per rep_type, unique image_id per
    /// rep_type (ConflictError).
    static Store from_records(std::vector<EmbeddingRecord> records, const TopicMapConfig& topic_map = {});

    std::span<const EmbeddingRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Active min-image threshold (1 for an unfiltered store).
    std::size_t min_images() const noexcept { return min_images_; }
    /// Records removed by the topic map's drop list during construction.
    std::size_t dropped_records() const noexcept { return dropped_; }

    std::vector<std::string> rep_types() const;
    std::size_t dimension(std::string_view rep_type) const;
    bool has_rep(std::string_view rep_type) const;

    /// Low-resource topics and countries across all rep_types.
    std::vector<std::string> topics() const;
    std::vector<std::string> countries() const;
    std::vector<std::string> high_topics(std::string_view rep_type) const;

    /// Distinct low-resource (topic, country) pairs, optionally for one rep.
    std::vector<PairKey> pairs(std::optional<std::string_view> rep_type = std::nullopt) const;

    /// Countries holding `topic` under `rep_type`.
    std::vector<std::string> countries_for(std::string_view topic, std::string_view rep_type) const;

    /// Indices into records() for a group, ordered by image_id. Empty if absent.
    std::span<const std::size_t> group(const GroupKey& key) const;
    std::size_t group_size(const GroupKey& key) const { return group(key).size(); }

    const std::map<GroupKey, std::vector<std::size_t>>& groups() const noexcept { return groups_; }

    std::vector<CoverageGap> coverage_gaps() const;

    bool operator==(const Store& other) const { return records_ == other.records_ && min_images_ == other.min_images_; }

private:
    friend struct FilterAccess;
    void index();

    std::vector<EmbeddingRecord> records_;
    std::map<GroupKey, std::vector<std::size_t>> groups_;
    std::map<std::string, std::size_t, std::less<>> dims_;
    std::size_t min_images_ = 1;
    std::size_t dropped_ = 0;
};

/// Reads every file through the interchange parser and builds a store.
/// Malformed records raise IngestError; duplicates raise ConflictError.
Store ingest(std::span<const std::filesystem::path> paths, const TopicMapConfig& topic_map = {});

struct RemovedGroup {
    std::string topic;
    std::string country;  // kHighLabel for high-resource groups
    std::string rep_type;
    std::size_t count = 0;
};

struct FilterResult {
    Store store;
    std::vector<RemovedGroup> removed;
};

/// Drops every low-resource (topic, country, rep_type) group and every
/// high-resource (topic, rep_type) group holding fewer than `min_images`
/// records. min_images == 0 is rejected with ConfigError.
FilterResult filter_min_images(const Store& store, std::size_t min_images = 10);

struct CorpusStats {
    std::size_t n_topics = 0;
    std::size_t n_countries = 0;
    std::size_t n_pairs = 0;
    std::size_t n_low_images = 0;
    std::size_t n_high_images = 0;
    double mean_images_per_pair = 0.0;
    double median_images_per_pair = 0.0;
    std::string designated_rep;
};

/// Image counts come from the lexicographically first rep_type; every other
/// rep_type holding a pair must report the same count for it
/// (ConsistencyError). Pairs absent under some rep are coverage gaps, not
/// disagreements.
CorpusStats stats(const Store& store);

}  // namespace geodiv
