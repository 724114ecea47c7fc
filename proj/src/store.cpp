// SPDX-License-Identifier: Apache-2.0
#include "geodiv/store.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "geodiv/error.hpp"
#include "geodiv/interchange.hpp"
#include "geodiv/numeric.hpp"

namespace geodiv {

std::string_view to_string(Dataset d) {
    return d == Dataset::low_resource ? "low_resource" : "high_resource";
}

Dataset parse_dataset(std::string_view s) {
    if (s == "low_resource") return Dataset::low_resource;
    if (s == "high_resource") return Dataset::high_resource;
    throw DomainError("unknown dataset '" + std::string(s) + "'");
}

IngestError::IngestError(std::string file, std::size_t line, std::string field, const std::string& what)
    : Error(file + ":" + std::to_string(line) + ": field '" + field + "': " + what),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

DivergenceError::DivergenceError(std::size_t epoch, const std::string& what) : Error(what), epoch_(epoch) {}

namespace {

auto sort_key(const EmbeddingRecord& r) {
    return std::tie(r.rep_type, r.dataset, r.topic, r.country, r.image_id);
}

}  // namespace

struct FilterAccess {
    static Store make(std::vector<EmbeddingRecord> records, std::size_t min_images, std::size_t dropped) {
        Store s;
        s.records_ = std::move(records);
        s.min_images_ = min_images;
        s.dropped_ = dropped;
        s.index();
        return s;
    }
};

Store Store::from_records(std::vector<EmbeddingRecord> records, const TopicMapConfig& topic_map) {
    std::vector<EmbeddingRecord> kept;
    kept.reserve(records.size());
    std::size_t dropped = 0;
    for (auto& r : records) {
        if (r.image_id.empty()) throw DomainError("record with empty image_id");
        if (r.rep_type.empty()) throw DomainError("record '" + r.image_id + "' has an empty rep_type");
        if ((r.dataset == Dataset::low_resource) != r.country.has_value())
            throw DomainError("record '" + r.image_id + "': country must be present exactly for low-resource data");
        if (r.vector.empty()) throw DomainError("record '" + r.image_id + "' has an empty vector");
        for (double x : r.vector)
            if (!std::isfinite(x)) throw DomainError("record '" + r.image_id + "' has a non-finite value");
        if (numeric::norm(r.vector) == 0.0) throw DomainError("record '" + r.image_id + "' has a zero-norm vector");

        auto topic = topic_map.resolve(r.topic, r.dataset);
        if (!topic) {
            ++dropped;
            continue;
        }
        r.topic = std::move(*topic);
        if (r.country) r.country = canonical_topic(*r.country);
        kept.push_back(std::move(r));
    }

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });

    std::map<std::string, std::size_t, std::less<>> dims;
    std::set<std::pair<std::string_view, std::string_view>> ids;
    for (const auto& r : kept) {
        auto [it, inserted] = dims.try_emplace(r.rep_type, r.vector.size());
        if (!inserted && it->second != r.vector.size())
            throw DomainError("dimension mismatch within rep_type '" + r.rep_type + "' at record '" + r.image_id + "'");
        if (!ids.emplace(r.rep_type, r.image_id).second)
            throw ConflictError("duplicate image_id '" + r.image_id + "' under rep_type '" + r.rep_type + "'");
    }
    return FilterAccess::make(std::move(kept), 1, dropped);
}

void Store::index() {
    groups_.clear();
    dims_.clear();
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        GroupKey key{r.topic, r.country, r.rep_type};
        groups_[key].push_back(i);
        dims_.try_emplace(r.rep_type, r.vector.size());
    }
    for (auto& [key, idx] : groups_)
        std::sort(idx.begin(), idx.end(),
                  [this](std::size_t a, std::size_t b) { return records_[a].image_id < records_[b].image_id; });
}

std::vector<std::string> Store::rep_types() const {
    std::vector<std::string> out;
    for (const auto& [rep, _] : dims_) out.push_back(rep);
    return out;
}

std::size_t Store::dimension(std::string_view rep_type) const {
    auto it = dims_.find(rep_type);
    if (it == dims_.end()) throw MissingGroupError("rep_type '" + std::string(rep_type) + "' not in store");
    return it->second;
}

bool Store::has_rep(std::string_view rep_type) const { return dims_.find(rep_type) != dims_.end(); }

std::vector<std::string> Store::topics() const {
    std::set<std::string> s;
    for (const auto& [key, _] : groups_)
        if (!key.is_high()) s.insert(key.topic);
    return {s.begin(), s.end()};
}

std::vector<std::string> Store::countries() const {
    std::set<std::string> s;
    for (const auto& [key, _] : groups_)
        if (!key.is_high()) s.insert(*key.country);
    return {s.begin(), s.end()};
}

std::vector<std::string> Store::high_topics(std::string_view rep_type) const {
    std::set<std::string> s;
    for (const auto& [key, _] : groups_)
        if (key.is_high() && key.rep_type == rep_type) s.insert(key.topic);
    return {s.begin(), s.end()};
}

std::vector<PairKey> Store::pairs(std::optional<std::string_view> rep_type) const {
    std::set<PairKey> s;
    for (const auto& [key, _] : groups_)
        if (!key.is_high() && (!rep_type || key.rep_type == *rep_type)) s.insert({key.topic, *key.country});
    return {s.begin(), s.end()};
}

std::vector<std::string> Store::countries_for(std::string_view topic, std::string_view rep_type) const {
    std::vector<std::string> out;
    for (const auto& [key, _] : groups_)
        if (!key.is_high() && key.topic == topic && key.rep_type == rep_type) out.push_back(*key.country);
    return out;  // map order keeps these sorted
}

std::span<const std::size_t> Store::group(const GroupKey& key) const {
    auto it = groups_.find(key);
    if (it == groups_.end()) return {};
    return it->second;
}

std::vector<CoverageGap> Store::coverage_gaps() const {
    const auto reps = rep_types();
    std::vector<CoverageGap> out;
    for (const auto& pair : pairs()) {
        CoverageGap gap{pair, {}, {}};
        for (const auto& rep : reps)
            (groups_.contains(GroupKey::low(pair.topic, pair.country, rep)) ? gap.present_in : gap.absent_in)
                .push_back(rep);
        if (!gap.absent_in.empty()) out.push_back(std::move(gap));
    }
    return out;
}

Store ingest(std::span<const std::filesystem::path> paths, const TopicMapConfig& topic_map) {
    interchange::DimensionRegistry dims;
    std::vector<EmbeddingRecord> all;
    for (const auto& p : paths) {
        auto recs = interchange::read_file(p, dims);
        std::move(recs.begin(), recs.end(), std::back_inserter(all));
    }
    return Store::from_records(std::move(all), topic_map);
}

FilterResult filter_min_images(const Store& store, std::size_t min_images) {
    if (min_images == 0) throw ConfigError("min_images must be at least 1");
    FilterResult result;
    std::vector<char> keep(store.size(), 1);
    for (const auto& [key, idx] : store.groups()) {
        if (idx.size() >= min_images) continue;
        result.removed.push_back({key.topic, key.label(), key.rep_type, idx.size()});
        for (auto i : idx) keep[i] = 0;
    }
    std::vector<EmbeddingRecord> kept;
    const auto recs = store.records();
    for (std::size_t i = 0; i < recs.size(); ++i)
        if (keep[i]) kept.push_back(recs[i]);
    result.store = FilterAccess::make(std::move(kept), std::max(min_images, store.min_images()),
                                      store.dropped_records());
    return result;
}

CorpusStats stats(const Store& store) {
    if (store.empty()) throw DomainError("stats: store is empty");
    const auto reps = store.rep_types();
    CorpusStats s;
    s.designated_rep = reps.front();

    const auto all_pairs = store.pairs();
    for (const auto& rep : reps) {
        for (const auto& p : all_pairs) {
            const auto a = store.group_size(GroupKey::low(p.topic, p.country, s.designated_rep));
            const auto b = store.group_size(GroupKey::low(p.topic, p.country, rep));
            // A pair missing under one rep is a coverage gap, reported separately.
            if (a != 0 && b != 0 && a != b)
                throw ConsistencyError("rep_types '" + s.designated_rep + "' and '" + rep + "' disagree on image count for (" +
                                       p.topic + ", " + p.country + "): " + std::to_string(a) + " vs " + std::to_string(b));
        }
    }

    s.n_topics = store.topics().size();
    s.n_countries = store.countries().size();
    s.n_pairs = all_pairs.size();

    std::vector<double> counts;
    for (const auto& [key, idx] : store.groups()) {
        if (key.rep_type != s.designated_rep) continue;
        if (key.is_high()) {
            s.n_high_images += idx.size();
        } else {
            s.n_low_images += idx.size();
            counts.push_back(static_cast<double>(idx.size()));
        }
    }
    if (!counts.empty()) {
        s.mean_images_per_pair = numeric::mean(counts);
        s.median_images_per_pair = numeric::median(counts);
    }
    return s;
}

}  // namespace geodiv
