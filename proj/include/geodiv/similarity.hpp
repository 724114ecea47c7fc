// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geodiv/store.hpp"

namespace geodiv {

/// Cosine similarity clamped to [-1, 1]. Zero-norm input raises DomainError.
double cosine(std::span<const double> a, std::span<const double> b);

struct Centroid {
    std::vector<double> direction;  // unit norm
    std::size_t count = 0;
};

/// Mean of the L2-normalized members, renormalized. Members are summed with
/// pairwise summation in the given order. Throws DegenerateError when the mean
/// has norm below 1e-12.
Centroid centroid_of(std::span<const std::vector<double>> members);

/// Centroid of one store group. Throws MissingGroupError when the group is
/// absent or below the store's min-image threshold.
Centroid centroid(const Store& store, const GroupKey& group);

using CentroidTable = std::map<GroupKey, Centroid>;

/// Centroids of every group under the given rep_types.
CentroidTable build_centroids(const Store& store, std::span<const std::string> reps, unsigned threads = 1);

/// Per-representation topic x country scores against the high-resource pool.
struct SimilarityGrid {
    std::string rep_type;
    std::map<PairKey, double> cells;
    std::set<PairKey> missing;

    std::vector<std::string> topics() const;
    std::vector<std::string> countries() const;
};

/// Mean over all defined cells. Throws DomainError on an empty grid.
double rep_threshold(const SimilarityGrid& grid);

struct AnnotationTargetSet {
    std::vector<std::string> reps;
    std::vector<PairKey> targets;
    std::map<PairKey, std::map<std::string, double>> per_rep_scores;  // every candidate
    std::map<std::string, double> per_rep_thresholds;
    std::vector<PairKey> excluded;  // not defined under every rep
    std::size_t n_candidates = 0;

    /// Mean of the per-rep cosines for a pair.
    double headline_score(const PairKey& pair) const;
};

struct TargetOptions {
    /// Reject grids that disagree on the candidate universe.
    bool strict = false;
    /// Replace the mean-of-cells threshold for selected reps.
    std::map<std::string, double> thresholds;
};

/// Pairs strictly below threshold under every grid (set intersection).
AnnotationTargetSet select_targets(std::span<const SimilarityGrid> grids, const TargetOptions& options = {});

struct RepAgreement {
    std::string rep_a;
    std::string rep_b;
    std::optional<double> r;
    std::size_t shared_cells = 0;
    std::string error;  // set when r is undefined
};

/// Pairwise Pearson coefficients over cells shared by each pair of grids.
/// Throws DomainError for fewer than two grids.
std::vector<RepAgreement> rep_agreement(std::span<const SimilarityGrid> grids);

/// Symmetric country x country matrix with optional entries.
class CountryMatrix {
public:
    CountryMatrix() = default;
    explicit CountryMatrix(std::vector<std::string> countries);

    const std::vector<std::string>& countries() const noexcept { return countries_; }
    std::size_t size() const noexcept { return countries_.size(); }
    std::optional<double> at(std::size_t i, std::size_t j) const { return cells_[i * countries_.size() + j]; }
    void set(std::size_t i, std::size_t j, double v);
    std::optional<std::size_t> index_of(std::string_view country) const;

private:
    std::vector<std::string> countries_;
    std::vector<std::optional<double>> cells_;
};

struct CrossCountryGrid {
    std::string topic;
    std::map<std::string, CountryMatrix> per_rep;
    /// Mean over reps where every rep defines the entry; diagonal 1.
    CountryMatrix averaged;
};

struct CountryRanking {
    std::string topic;
    std::string anchor;
    std::vector<std::pair<std::string, double>> ranked;  // descending score, ties by name
    std::map<std::string, std::map<std::string, double>> rep_breakdown;
};

struct ScoreEntry {
    std::string name;
    double score = 0.0;
    std::size_t observations = 0;
};

struct AggregateScores {
    std::vector<ScoreEntry> countries;  // ascending score
    std::vector<ScoreEntry> topics;     // ascending score
    std::vector<std::string> skipped_topics;
};

/// Centroid-level analyses over a filtered store.
///
/// Construction computes every centroid for the chosen reps once; all queries
/// are const and safe to run concurrently. The store must outlive the engine.
class SimilarityEngine {
public:
    /// `reps` empty means every rep_type in the store.
    explicit SimilarityEngine(const Store& store, std::vector<std::string> reps = {}, unsigned threads = 1);
    SimilarityEngine(Store&&, std::vector<std::string> = {}, unsigned = 1) = delete;

    const Store& store() const noexcept { return *store_; }
    const std::vector<std::string>& reps() const noexcept { return reps_; }
    const CentroidTable& centroids() const noexcept { return centroids_; }
    unsigned threads() const noexcept { return threads_; }

    const Centroid* find(const GroupKey& key) const;

    /// Throws ConfigError when the store has no high-resource data for `rep`.
    SimilarityGrid low_high_grid(const std::string& rep) const;
    std::vector<SimilarityGrid> low_high_grids() const;

    AnnotationTargetSet select_targets(const TargetOptions& options = {}) const;

    /// Throws InsufficientDataError when fewer than two countries hold the
    /// topic under every rep.
    CrossCountryGrid cross_country_grid(const std::string& topic) const;

    /// Throws MissingGroupError when the anchor lacks the topic.
    CountryRanking rank_similar(const std::string& topic, const std::string& anchor) const;

    /// Grids for every topic that has at least two countries under all reps.
    std::map<std::string, CrossCountryGrid> all_cross_country_grids() const;

    AggregateScores aggregate_scores() const;

private:
    const Store* store_;
    std::vector<std::string> reps_;
    CentroidTable centroids_;
    unsigned threads_;
};

}  // namespace geodiv
