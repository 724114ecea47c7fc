// SPDX-License-Identifier: Apache-2.0
#include "geodiv/supplement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "geodiv/error.hpp"
#include "geodiv/parallel.hpp"
#include "geodiv/rng.hpp"

namespace geodiv {

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::similar: return "similar";
        case Regime::dissimilar: return "dissimilar";
        case Regime::high_resource: return "high_resource";
        case Regime::none: return "none";
    }
    return "unknown";
}

Regime parse_regime(std::string_view s) {
    for (auto r : kAllRegimes)
        if (to_string(r) == s) return r;
    throw DomainError("unknown regime '" + std::string(s) + "'");
}

LabelIndex::LabelIndex(const Store& store, const std::string& rep_type) {
    std::set<std::string> s;
    for (const auto& p : store.pairs(rep_type)) s.insert(p.topic);
    topics_.assign(s.begin(), s.end());
}

std::optional<std::size_t> LabelIndex::find(std::string_view topic) const {
    auto it = std::lower_bound(topics_.begin(), topics_.end(), topic);
    if (it == topics_.end() || *it != topic) return std::nullopt;
    return static_cast<std::size_t>(it - topics_.begin());
}

std::vector<PairKey> choose_targets(const Store& store, std::uint64_t seed, const std::string& rep_type) {
    std::vector<PairKey> out;
    const LabelIndex labels(store, rep_type);
    for (const auto& topic : labels.topics()) {
        const auto countries = store.countries_for(topic, rep_type);
        auto rng = Rng::derive(seed, "target|" + topic);
        out.push_back({topic, countries[static_cast<std::size_t>(rng.index(countries.size()))]});
    }
    return out;
}

namespace {

Sample make_sample(const EmbeddingRecord& r, std::size_t label) {
    return {r.image_id, label, r.topic, r.country.value_or(std::string{}), r.vector};
}

std::size_t removal_count(double ratio, std::size_t n) {
    // Guard against 0.7 * 10 = 7.000000000000001 rounding up to 8.
    const double k = std::ceil(ratio * static_cast<double>(n) - 1e-9);
    return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

}  // namespace

SplitResult split(const Store& store, std::span<const PairKey> targets, const EvalConfig& config,
                  const LabelIndex& labels) {
    config.validate();
    const std::set<PairKey> target_set(targets.begin(), targets.end());
    for (const auto& t : target_set) {
        const auto n = store.group_size(GroupKey::low(t.topic, t.country, config.rep_type));
        if (n < 2)
            throw SplitError(fmt::format("target pair ({}, {}) has {} image(s) under '{}'; need at least 2", t.topic,
                                         t.country, n, config.rep_type));
    }

    SplitResult out;
    for (const auto& [key, idx] : store.groups()) {
        if (key.is_high() || key.rep_type != config.rep_type) continue;
        const auto label = labels.find(key.topic);
        if (!label) continue;
        std::vector<std::size_t> order(idx.begin(), idx.end());
        auto rng = Rng::derive(config.seed, "split|" + key.topic + "|" + *key.country);
        rng.shuffle(order);
        const auto n = order.size();
        std::size_t n_train = n;
        if (n >= 2) {
            const auto want = static_cast<long long>(std::llround(config.split_fraction * static_cast<double>(n)));
            n_train = static_cast<std::size_t>(std::clamp<long long>(want, 1, static_cast<long long>(n) - 1));
        }
        for (std::size_t i = 0; i < n; ++i)
            (i < n_train ? out.train : out.test).push_back(make_sample(store.records()[order[i]], *label));
    }
    return out;
}

std::size_t RegimeTrain::total_shortfall() const {
    std::size_t s = 0;
    for (const auto& [_, v] : shortfall) s += v;
    return s;
}

RegimeTrain build_regime_train(std::span<const Sample> train, std::span<const PairKey> targets, Regime regime,
                               double ratio, const RankingTable& rankings, const Store& store,
                               const std::string& rep_type, const LabelIndex& labels, std::uint64_t seed) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw DomainError(fmt::format("replacement ratio {} outside [0, 1]", ratio));
    if (regime == Regime::similar || regime == Regime::dissimilar)
        for (const auto& t : targets)
            if (!rankings.contains(t))
                throw DomainError(fmt::format("no ranking for target pair ({}, {})", t.topic, t.country));

    std::map<PairKey, std::vector<std::size_t>> by_pair;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (!train[i].country.empty()) by_pair[{train[i].topic, train[i].country}].push_back(i);

    RegimeTrain out;
    std::vector<char> removed(train.size(), 0);
    std::vector<std::size_t> to_fill(targets.size(), 0);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& target = targets[t];
        auto members = by_pair[target];
        const auto k = removal_count(ratio, members.size());
        auto rng = Rng::derive(seed, "remove|" + target.topic + "|" + target.country);
        rng.shuffle(members);
        for (std::size_t i = 0; i < k; ++i) removed[members[i]] = 1;
        out.removed[target] = k;
        to_fill[t] = k;
    }

    for (std::size_t i = 0; i < train.size(); ++i)
        if (!removed[i]) out.samples.push_back(train[i]);

    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& target = targets[t];
        std::size_t need = to_fill[t];
        std::size_t added = 0;

        if (regime == Regime::similar || regime == Regime::dissimilar) {
            std::vector<std::string> donors;
            for (const auto& [country, _] : rankings.at(target).ranked) donors.push_back(country);
            if (regime == Regime::dissimilar) std::reverse(donors.begin(), donors.end());
            for (const auto& donor : donors) {
                if (need == 0) break;
                if (donor == target.country) continue;
                auto it = by_pair.find({target.topic, donor});
                if (it == by_pair.end()) continue;
                std::vector<std::size_t> pool;
                for (auto i : it->second)
                    if (!removed[i]) pool.push_back(i);
                auto rng = Rng::derive(seed, "donor|" + target.topic + "|" + target.country + "|" + donor);
                rng.shuffle(pool);
                for (std::size_t i = 0; i < pool.size() && need > 0; ++i, --need, ++added)
                    out.samples.push_back(train[pool[i]]);
            }
        } else if (regime == Regime::high_resource && need > 0) {
            const auto label = labels.find(target.topic);
            const auto idx = store.group(GroupKey::high(target.topic, rep_type));
            std::vector<std::size_t> pool(idx.begin(), idx.end());
            auto rng = Rng::derive(seed, "high|" + target.topic + "|" + target.country);
            rng.shuffle(pool);
            for (std::size_t i = 0; i < pool.size() && need > 0; ++i, --need, ++added)
                out.samples.push_back(make_sample(store.records()[pool[i]], *label));
        }
        out.added[target] = added;
        out.shortfall[target] = regime == Regime::none ? 0 : need;
    }
    return out;
}

EvalResult evaluate(const LinearProbe& probe, std::span<const Sample> test, std::span<const PairKey> targets) {
    EvalResult out;
    out.n_test = test.size();
    if (!test.empty()) out.accuracy = accuracy(probe, test);

    std::map<PairKey, std::pair<std::size_t, std::size_t>> hits;  // correct, total
    for (const auto& t : targets) hits[t] = {0, 0};
    for (const auto& s : test) {
        auto it = hits.find({s.topic, s.country});
        if (it == hits.end()) continue;
        ++it->second.second;
        if (probe.predict(s.x) == s.label) ++it->second.first;
    }
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& t : targets) {
        const auto [correct, total] = hits.at(t);
        PairAccuracy pa{t, total, std::nullopt};
        if (total > 0) {
            pa.accuracy = static_cast<double>(correct) / static_cast<double>(total);
            sum += *pa.accuracy;
            ++defined;
        }
        out.per_target.push_back(std::move(pa));
    }
    if (defined > 0) out.target_accuracy = sum / static_cast<double>(defined);
    return out;
}

const EvalCell& EvalReport::cell(Regime regime, double ratio) const {
    for (const auto& c : cells)
        if (c.regime == regime && c.ratio == ratio) return c;
    throw MissingGroupError(fmt::format("no cell ({}, {})", to_string(regime), ratio));
}

RankingTable target_rankings(const Store& store, std::span<const PairKey> targets, const EvalConfig& config,
                             unsigned threads) {
    SimilarityEngine engine(store, config.similarity_reps, threads);
    RankingTable out;
    for (const auto& t : targets) {
        try {
            out.emplace(t, engine.rank_similar(t.topic, t.country));
        } catch (const InsufficientDataError&) {
            out.emplace(t, CountryRanking{t.topic, t.country, {}, {}});
        } catch (const MissingGroupError&) {
            out.emplace(t, CountryRanking{t.topic, t.country, {}, {}});
        }
    }
    return out;
}

EvalReport run_experiment(const Store& store, const EvalConfig& config, unsigned threads) {
    config.validate();
    if (!store.has_rep(config.rep_type)) throw MissingGroupError("rep_type '" + config.rep_type + "' not in store");
    const LabelIndex labels(store, config.rep_type);
    if (labels.size() < 2) throw InsufficientDataError("experiment: need at least two topics");

    EvalReport report;
    report.config = config;
    report.targets = choose_targets(store, config.seed, config.rep_type);
    const auto data = split(store, report.targets, config, labels);
    const auto rankings = target_rankings(store, report.targets, config, threads);

    struct Job {
        std::optional<Regime> regime;  // nullopt = upper bound
        double ratio;
    };
    std::vector<Job> jobs{{std::nullopt, 0.0}};
    for (auto regime : kAllRegimes)
        for (double ratio : config.ratios) jobs.push_back({regime, ratio});

    std::vector<EvalCell> results(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const auto& job = jobs[j];
        RegimeTrain built;
        if (job.regime)
            built = build_regime_train(data.train, report.targets, *job.regime, job.ratio, rankings, store,
                                       config.rep_type, labels, config.seed);
        else
            built.samples = data.train;
        const auto probe = train_linear_probe(built.samples, labels.size(), config);
        const auto eval = evaluate(probe, data.test, report.targets);
        results[j] = {job.regime.value_or(Regime::none), job.ratio, eval.accuracy, eval.target_accuracy,
                      built.samples.size(), eval.n_test, built.total_shortfall(), probe.final_loss};
    });

    report.upper_bound_accuracy = results.front().accuracy;
    report.upper_bound_target_accuracy = results.front().target_accuracy;
    report.cells.assign(results.begin() + 1, results.end());
    return report;
}

}  // namespace geodiv
