// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geodiv/probe.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/store.hpp"

namespace geodiv {

/// Donor policy used to refill removed target-country training images.
enum class Regime { similar, dissimilar, high_resource, none };

inline constexpr std::array<Regime, 4> kAllRegimes{Regime::similar, Regime::dissimilar, Regime::high_resource,
                                                   Regime::none};

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view s);

/// One uniformly random retained country per topic, deterministic in seed.
std::vector<PairKey> choose_targets(const Store& store, std::uint64_t seed, const std::string& rep_type);

/// Maps topics to class indices (sorted low-resource topics under the rep).
class LabelIndex {
public:
    LabelIndex() = default;
    LabelIndex(const Store& store, const std::string& rep_type);

    std::size_t size() const noexcept { return topics_.size(); }
    std::optional<std::size_t> find(std::string_view topic) const;
    const std::vector<std::string>& topics() const noexcept { return topics_; }

private:
    std::vector<std::string> topics_;
};

struct SplitResult {
    std::vector<Sample> train;
    std::vector<Sample> test;
};

/// Stratified per (topic, country) split at config.split_fraction. Groups of
/// two or more images keep at least one image on each side. Throws SplitError
/// for a target pair with fewer than two images.
SplitResult split(const Store& store, std::span<const PairKey> targets, const EvalConfig& config,
                  const LabelIndex& labels);

struct RegimeTrain {
    std::vector<Sample> samples;
    std::map<PairKey, std::size_t> removed;
    std::map<PairKey, std::size_t> added;
    std::map<PairKey, std::size_t> shortfall;

    std::size_t total_shortfall() const;
};

using RankingTable = std::map<PairKey, CountryRanking>;

/// Removes ceil(ratio * n) randomly chosen training images of each target
/// pair and refills the same count from the regime's donors. Donors are
/// training-side images of other countries (in ranking order, most similar
/// first for `similar`, least similar first for `dissimilar`) or
/// topic-matched high-resource records. No donor image is used twice.
RegimeTrain build_regime_train(std::span<const Sample> train, std::span<const PairKey> targets, Regime regime,
                               double ratio, const RankingTable& rankings, const Store& store,
                               const std::string& rep_type, const LabelIndex& labels, std::uint64_t seed);

struct PairAccuracy {
    PairKey pair;
    std::size_t n_test = 0;
    std::optional<double> accuracy;
};

struct EvalResult {
    double accuracy = 0.0;
    std::size_t n_test = 0;
    std::vector<PairAccuracy> per_target;
    /// Mean of per-target accuracies over targets with test images.
    std::optional<double> target_accuracy;
};

EvalResult evaluate(const LinearProbe& probe, std::span<const Sample> test, std::span<const PairKey> targets);

struct EvalCell {
    Regime regime = Regime::none;
    double ratio = 0.0;
    double accuracy = 0.0;
    std::optional<double> target_accuracy;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t shortfall = 0;
    double final_loss = 0.0;
};

struct EvalReport {
    EvalConfig config;
    std::vector<PairKey> targets;
    double upper_bound_accuracy = 0.0;
    std::optional<double> upper_bound_target_accuracy;
    std::vector<EvalCell> cells;  // regime-major, ratios in config order

    const EvalCell& cell(Regime regime, double ratio) const;
};

/// Rankings for each target, averaged over config.similarity_reps. Targets
/// whose topic has no other country get an empty ranking.
RankingTable target_rankings(const Store& store, std::span<const PairKey> targets, const EvalConfig& config,
                             unsigned threads = 1);

/// Trains and evaluates one probe per (regime, ratio) cell on one shared split
/// and seed, plus the unmodified upper bound. Cells run on up to `threads`
/// workers without affecting results.
EvalReport run_experiment(const Store& store, const EvalConfig& config, unsigned threads = 1);

}  // namespace geodiv
