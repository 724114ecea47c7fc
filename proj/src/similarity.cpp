// SPDX-License-Identifier: Apache-2.0
#include "geodiv/similarity.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "geodiv/error.hpp"
#include "geodiv/geo.hpp"
#include "geodiv/numeric.hpp"
#include "geodiv/parallel.hpp"

namespace geodiv {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("cosine: dimension mismatch");
    // Extended precision covers the full double range without scaling and
    // makes cosine(v, v) round to exactly 1.
    long double ab = 0.0L, aa = 0.0L, bb = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double x = a[i], y = b[i];
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if (!(aa > 0.0L) || !(bb > 0.0L)) throw DomainError("cosine: zero-norm input");
    const auto c = static_cast<double>(ab / std::sqrt(aa * bb));
    return std::clamp(c, -1.0, 1.0);
}

Centroid centroid_of(std::span<const std::vector<double>> members) {
    if (members.empty()) throw MissingGroupError("centroid of an empty group");
    std::vector<std::vector<double>> unit;
    unit.reserve(members.size());
    for (const auto& m : members) unit.push_back(numeric::normalized(m));
    auto sum = numeric::pairwise_sum_rows(unit);
    const double n = static_cast<double>(members.size());
    for (double& x : sum) x /= n;
    if (numeric::norm(sum) < 1e-12) throw DegenerateError("centroid: mean of unit vectors has norm below 1e-12");
    return {numeric::normalized(sum), members.size()};
}

Centroid centroid(const Store& store, const GroupKey& group) {
    const auto idx = store.group(group);
    const auto label = fmt::format("({}, {}, {})", group.topic, group.label(), group.rep_type);
    if (idx.empty()) throw MissingGroupError("group " + label + " not in store");
    if (idx.size() < store.min_images())
        throw MissingGroupError(fmt::format("group {} has {} images, below the threshold {}", label, idx.size(),
                                            store.min_images()));
    std::vector<std::vector<double>> members;
    members.reserve(idx.size());
    for (auto i : idx) members.push_back(store.records()[i].vector);
    return centroid_of(members);
}

CentroidTable build_centroids(const Store& store, std::span<const std::string> reps, unsigned threads) {
    std::vector<GroupKey> keys;
    for (const auto& [key, _] : store.groups())
        if (std::find(reps.begin(), reps.end(), key.rep_type) != reps.end()) keys.push_back(key);
    std::vector<Centroid> values(keys.size());
    parallel_for(keys.size(), threads, [&](std::size_t i) { values[i] = centroid(store, keys[i]); });
    CentroidTable table;
    for (std::size_t i = 0; i < keys.size(); ++i) table.emplace(std::move(keys[i]), std::move(values[i]));
    return table;
}

std::vector<std::string> SimilarityGrid::topics() const {
    std::set<std::string> s;
    for (const auto& [p, _] : cells) s.insert(p.topic);
    for (const auto& p : missing) s.insert(p.topic);
    return {s.begin(), s.end()};
}

std::vector<std::string> SimilarityGrid::countries() const {
    std::set<std::string> s;
    for (const auto& [p, _] : cells) s.insert(p.country);
    for (const auto& p : missing) s.insert(p.country);
    return {s.begin(), s.end()};
}

double rep_threshold(const SimilarityGrid& grid) {
    if (grid.cells.empty()) throw DomainError("threshold of an empty grid (rep '" + grid.rep_type + "')");
    std::vector<double> v;
    v.reserve(grid.cells.size());
    for (const auto& [_, s] : grid.cells) v.push_back(s);
    return numeric::mean(v);
}

double AnnotationTargetSet::headline_score(const PairKey& pair) const {
    const auto& scores = per_rep_scores.at(pair);
    std::vector<double> v;
    for (const auto& [_, s] : scores) v.push_back(s);
    return numeric::mean(v);
}

AnnotationTargetSet select_targets(std::span<const SimilarityGrid> grids, const TargetOptions& options) {
    if (grids.empty()) throw DomainError("select_targets: at least one representation is required");
    AnnotationTargetSet out;
    for (const auto& g : grids) {
        if (std::find(out.reps.begin(), out.reps.end(), g.rep_type) != out.reps.end())
            throw DomainError("select_targets: rep '" + g.rep_type + "' given twice");
        out.reps.push_back(g.rep_type);
        auto it = options.thresholds.find(g.rep_type);
        out.per_rep_thresholds[g.rep_type] = it != options.thresholds.end() ? it->second : rep_threshold(g);
    }

    std::set<PairKey> universe;
    for (const auto& g : grids) {
        for (const auto& [p, _] : g.cells) universe.insert(p);
        universe.insert(g.missing.begin(), g.missing.end());
    }

    for (const auto& p : universe) {
        const bool everywhere = std::all_of(grids.begin(), grids.end(), [&](const auto& g) { return g.cells.contains(p); });
        if (!everywhere) {
            out.excluded.push_back(p);
            continue;
        }
        ++out.n_candidates;
        bool below = true;
        auto& scores = out.per_rep_scores[p];
        for (const auto& g : grids) {
            const double s = g.cells.at(p);
            scores[g.rep_type] = s;
            if (!(s < out.per_rep_thresholds.at(g.rep_type))) below = false;
        }
        if (below) out.targets.push_back(p);
    }
    if (options.strict && !out.excluded.empty())
        throw ConsistencyError(fmt::format("select_targets: {} pair(s) are not defined under every rep, e.g. ({}, {})",
                                           out.excluded.size(), out.excluded.front().topic, out.excluded.front().country));
    return out;
}

std::vector<RepAgreement> rep_agreement(std::span<const SimilarityGrid> grids) {
    if (grids.size() < 2) throw DomainError("rep_agreement: need at least two grids");
    std::vector<RepAgreement> out;
    for (std::size_t i = 0; i < grids.size(); ++i) {
        for (std::size_t j = i + 1; j < grids.size(); ++j) {
            RepAgreement a{grids[i].rep_type, grids[j].rep_type, std::nullopt, 0, {}};
            std::vector<double> x, y;
            for (const auto& [p, s] : grids[i].cells) {
                auto it = grids[j].cells.find(p);
                if (it == grids[j].cells.end()) continue;
                x.push_back(s);
                y.push_back(it->second);
            }
            a.shared_cells = x.size();
            try {
                a.r = geo::pearson(x, y);
            } catch (const UndefinedCorrelationError& e) {
                a.error = e.what();
            }
            out.push_back(std::move(a));
        }
    }
    return out;
}

CountryMatrix::CountryMatrix(std::vector<std::string> countries)
    : countries_(std::move(countries)), cells_(countries_.size() * countries_.size()) {}

void CountryMatrix::set(std::size_t i, std::size_t j, double v) {
    const auto n = countries_.size();
    cells_[i * n + j] = v;
    cells_[j * n + i] = v;
}

std::optional<std::size_t> CountryMatrix::index_of(std::string_view country) const {
    auto it = std::lower_bound(countries_.begin(), countries_.end(), country);
    if (it == countries_.end() || *it != country) return std::nullopt;
    return static_cast<std::size_t>(it - countries_.begin());
}

SimilarityEngine::SimilarityEngine(const Store& store, std::vector<std::string> reps, unsigned threads)
    : store_(&store), reps_(std::move(reps)), threads_(std::max(1u, threads)) {
    if (reps_.empty()) reps_ = store.rep_types();
    if (reps_.empty()) throw DomainError("similarity engine: store has no representations");
    std::sort(reps_.begin(), reps_.end());
    if (std::adjacent_find(reps_.begin(), reps_.end()) != reps_.end())
        throw DomainError("similarity engine: duplicate rep_type");
    for (const auto& r : reps_)
        if (!store.has_rep(r)) throw MissingGroupError("rep_type '" + r + "' not in store");
    centroids_ = build_centroids(store, reps_, threads_);
}

const Centroid* SimilarityEngine::find(const GroupKey& key) const {
    auto it = centroids_.find(key);
    return it == centroids_.end() ? nullptr : &it->second;
}

SimilarityGrid SimilarityEngine::low_high_grid(const std::string& rep) const {
    if (std::find(reps_.begin(), reps_.end(), rep) == reps_.end())
        throw MissingGroupError("rep_type '" + rep + "' not loaded in the similarity engine");
    if (store_->high_topics(rep).empty())
        throw ConfigError("no high-resource data for rep_type '" + rep + "'");
    SimilarityGrid grid;
    grid.rep_type = rep;
    for (const auto& p : store_->pairs(rep)) {
        const auto* low = find(GroupKey::low(p.topic, p.country, rep));
        const auto* high = find(GroupKey::high(p.topic, rep));
        if (low && high)
            grid.cells.emplace(p, cosine(low->direction, high->direction));
        else
            grid.missing.insert(p);
    }
    return grid;
}

std::vector<SimilarityGrid> SimilarityEngine::low_high_grids() const {
    std::vector<SimilarityGrid> out(reps_.size());
    parallel_for(reps_.size(), threads_, [&](std::size_t i) { out[i] = low_high_grid(reps_[i]); });
    return out;
}

AnnotationTargetSet SimilarityEngine::select_targets(const TargetOptions& options) const {
    const auto grids = low_high_grids();
    return geodiv::select_targets(grids, options);
}

CrossCountryGrid SimilarityEngine::cross_country_grid(const std::string& topic) const {
    std::set<std::string> all;
    for (const auto& rep : reps_)
        for (auto& c : store_->countries_for(topic, rep))
            if (find(GroupKey::low(topic, c, rep))) all.insert(c);
    std::vector<std::string> countries(all.begin(), all.end());

    CrossCountryGrid grid;
    grid.topic = topic;
    grid.averaged = CountryMatrix(countries);
    const auto n = countries.size();

    std::vector<std::vector<const Centroid*>> by_rep(reps_.size(), std::vector<const Centroid*>(n));
    for (std::size_t r = 0; r < reps_.size(); ++r)
        for (std::size_t i = 0; i < n; ++i) by_rep[r][i] = find(GroupKey::low(topic, countries[i], reps_[r]));

    std::size_t complete = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool everywhere = true;
        for (std::size_t r = 0; r < reps_.size(); ++r) everywhere = everywhere && by_rep[r][i];
        if (everywhere) {
            ++complete;
            grid.averaged.set(i, i, 1.0);
        }
    }
    if (complete < 2)
        throw InsufficientDataError(fmt::format("topic '{}' is held by {} countries under every rep; need at least 2",
                                                topic, complete));

    for (std::size_t r = 0; r < reps_.size(); ++r) {
        CountryMatrix m(countries);
        for (std::size_t i = 0; i < n; ++i) {
            if (!by_rep[r][i]) continue;
            m.set(i, i, 1.0);
            for (std::size_t j = i + 1; j < n; ++j)
                if (by_rep[r][j]) m.set(i, j, cosine(by_rep[r][i]->direction, by_rep[r][j]->direction));
        }
        grid.per_rep.emplace(reps_[r], std::move(m));
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sum = 0.0;
            bool everywhere = true;
            for (const auto& rep : reps_) {
                const auto v = grid.per_rep.at(rep).at(i, j);
                if (!v) {
                    everywhere = false;
                    break;
                }
                sum += *v;
            }
            if (everywhere) grid.averaged.set(i, j, sum / static_cast<double>(reps_.size()));
        }
    }
    return grid;
}

CountryRanking SimilarityEngine::rank_similar(const std::string& topic, const std::string& anchor) const {
    for (const auto& rep : reps_)
        if (!find(GroupKey::low(topic, anchor, rep)))
            throw MissingGroupError(fmt::format("pair ({}, {}) not in store under rep '{}'", topic, anchor, rep));

    const auto grid = cross_country_grid(topic);
    const auto a = *grid.averaged.index_of(anchor);

    CountryRanking out;
    out.topic = topic;
    out.anchor = anchor;
    for (std::size_t j = 0; j < grid.averaged.size(); ++j) {
        if (j == a) continue;
        const auto v = grid.averaged.at(a, j);
        if (!v) continue;
        const auto& c = grid.averaged.countries()[j];
        out.ranked.emplace_back(c, *v);
        for (const auto& [rep, m] : grid.per_rep) out.rep_breakdown[c][rep] = *m.at(a, j);
    }
    std::sort(out.ranked.begin(), out.ranked.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    return out;
}

std::map<std::string, CrossCountryGrid> SimilarityEngine::all_cross_country_grids() const {
    const auto topics = store_->topics();
    std::vector<std::optional<CrossCountryGrid>> grids(topics.size());
    parallel_for(topics.size(), threads_, [&](std::size_t i) {
        try {
            grids[i] = cross_country_grid(topics[i]);
        } catch (const InsufficientDataError&) {
        }
    });
    std::map<std::string, CrossCountryGrid> out;
    for (std::size_t i = 0; i < topics.size(); ++i)
        if (grids[i]) out.emplace(topics[i], std::move(*grids[i]));
    return out;
}

AggregateScores SimilarityEngine::aggregate_scores() const {
    const auto grids = all_cross_country_grids();
    AggregateScores out;
    for (const auto& t : store_->topics())
        if (!grids.contains(t)) out.skipped_topics.push_back(t);

    std::map<std::string, std::vector<double>> per_country;
    for (const auto& [topic, grid] : grids) {
        const auto& m = grid.averaged;
        std::vector<double> values;
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = i + 1; j < m.size(); ++j) {
                const auto v = m.at(i, j);
                if (!v) continue;
                values.push_back(*v);
                per_country[m.countries()[i]].push_back(*v);
                per_country[m.countries()[j]].push_back(*v);
            }
        }
        if (!values.empty()) out.topics.push_back({topic, numeric::mean(values), values.size()});
    }
    for (const auto& [country, values] : per_country) out.countries.push_back({country, numeric::mean(values), values.size()});

    auto ascending = [](const ScoreEntry& a, const ScoreEntry& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.name < b.name;
    };
    std::sort(out.countries.begin(), out.countries.end(), ascending);
    std::sort(out.topics.begin(), out.topics.end(), ascending);
    return out;
}

}  // namespace geodiv
