// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geodiv {

enum class Dataset { low_resource, high_resource };

std::string_view to_string(Dataset d);
Dataset parse_dataset(std::string_view s);  // throws DomainError

/// Label used wherever the high-resource pool stands in for a country.
inline constexpr std::string_view kHighLabel = "HIGH";

/// One image's vector under one representation type.
struct EmbeddingRecord {
    std::string image_id;
    Dataset dataset = Dataset::low_resource;
    std::string source;
    std::string topic;
    std::optional<std::string> country;  // present iff dataset == low_resource
    std::string rep_type;
    std::vector<double> vector;

    bool operator==(const EmbeddingRecord&) const = default;
};

/// A (topic, country) slice of the low-resource corpus.
struct PairKey {
    std::string topic;
    std::string country;

    auto operator<=>(const PairKey&) const = default;
    bool operator==(const PairKey&) const = default;
};

/// A (topic, country-or-HIGH, rep_type) group; an empty `country` means the
/// pooled high-resource data for the topic.
struct GroupKey {
    std::string topic;
    std::optional<std::string> country;
    std::string rep_type;

    static GroupKey low(std::string topic, std::string country, std::string rep) {
        return {std::move(topic), std::move(country), std::move(rep)};
    }
    static GroupKey high(std::string topic, std::string rep) {
        return {std::move(topic), std::nullopt, std::move(rep)};
    }

    bool is_high() const noexcept { return !country.has_value(); }
    std::string label() const { return country ? *country : std::string(kHighLabel); }

    auto operator<=>(const GroupKey&) const = default;
    bool operator==(const GroupKey&) const = default;
};

}  // namespace geodiv
