// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geodiv {
class SimilarityEngine;
}

namespace geodiv::geo {

struct LatLon {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

struct GeodesicDistance {
    double km = 0.0;
    bool fallback = false;  // spherical great-circle used after non-convergence
    int iterations = 0;
};

/// WGS-84 parameters.
inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84F = 1.0 / 298.257223563;
inline constexpr double kMeanEarthRadiusKm = 6371.0088;

/// Inverse geodesic via Vincenty's iteration (tolerance 1e-12 rad, at most 200
/// iterations). Near-antipodal points that fail to converge fall back to the
/// spherical distance and set `fallback`. Throws DomainError on out-of-range
/// coordinates.
GeodesicDistance vincenty_inverse(LatLon a, LatLon b);

inline double vincenty_distance(LatLon a, LatLon b) { return vincenty_inverse(a, b).km; }

/// Haversine distance on a sphere of mean Earth radius.
double great_circle_km(LatLon a, LatLon b);

/// Sample Pearson coefficient, clamped to [-1, 1]. Length mismatch raises
/// DomainError; fewer than two points or a constant series raises
/// UndefinedCorrelationError.
double pearson(std::span<const double> x, std::span<const double> y);

struct Capital {
    std::string country;
    std::string capital;
    LatLon location;
};

/// Country -> capital coordinates. Keys are canonical (lowercase, trimmed).
class CapitalTable {
public:
    /// CSV with header `country,capital,lat,lon`. Throws ConfigError.
    static CapitalTable from_csv(std::string_view text);
    static CapitalTable load(const std::filesystem::path& path);

    void add(Capital c);
    const Capital* find(std::string_view country) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, Capital, std::less<>>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, Capital, std::less<>> entries_;
};

struct PairObservation {
    std::string country_a;
    std::string country_b;
    double distance_km = 0.0;
    double similarity = 0.0;
    std::size_t shared_topics = 0;
    bool fallback = false;
};

struct CountryCorrelation {
    std::string country;
    std::optional<double> r;  // nullopt when undefined (< 2 pairs or constant)
    std::size_t n_pairs = 0;
    bool skipped = false;     // no capital on file
};

struct CorrelationReport {
    double global_r = 0.0;
    std::size_t n_pairs = 0;
    std::vector<CountryCorrelation> per_country;
    std::vector<PairObservation> observations;
    std::vector<std::string> skipped_countries;
};

/// Correlates capital-to-capital distance with the mean cross-country
/// similarity over shared topics. Pairs sharing no topic contribute nothing.
CorrelationReport geo_visual_correlation(const SimilarityEngine& engine, const CapitalTable& capitals);

struct SizeRow {
    std::string name;
    std::size_t images = 0;
    double score = 0.0;
};

struct SizeCorrelation {
    std::optional<double> topic_r;
    std::optional<double> country_r;
    std::vector<SizeRow> topics;
    std::vector<SizeRow> countries;
};

/// Correlates per-topic (per-country) low-resource image counts with the
/// aggregate cross-country similarity scores.
SizeCorrelation size_similarity_correlation(const SimilarityEngine& engine);

}  // namespace geodiv::geo
