// SPDX-License-Identifier: Apache-2.0
#include "geodiv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "geodiv/error.hpp"
#include "geodiv/numeric.hpp"
#include "geodiv/rng.hpp"

namespace geodiv {

using json = nlohmann::json;

namespace {

void require_canonical(const std::string& name, const char* what) {
    if (name.empty() || name != canonical_topic(name))
        throw ConfigError(fmt::format("synth: {} name '{}' must be lowercase and trimmed", what, name));
}

std::vector<PairKey> effective_pairs(const SynthSpec& spec) {
    if (!spec.pairs.empty()) return spec.pairs;
    std::vector<PairKey> out;
    for (const auto& t : spec.topics)
        for (const auto& c : spec.countries) out.push_back({t, c});
    return out;
}

std::vector<double> gaussian_unit(Rng rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (;;) {
        for (auto& x : v) x = rng.normal();
        if (numeric::norm(v) > 1e-8) return numeric::normalized(v);
    }
}

}  // namespace

void SynthSpec::validate() const {
    if (topics.empty()) throw ConfigError("synth: no topics");
    if (countries.empty()) throw ConfigError("synth: no countries");
    if (reps.empty()) throw ConfigError("synth: no rep_types");
    std::set<std::string> ts(topics.begin(), topics.end()), cs(countries.begin(), countries.end());
    if (ts.size() != topics.size()) throw ConfigError("synth: duplicate topic");
    if (cs.size() != countries.size()) throw ConfigError("synth: duplicate country");
    for (const auto& t : topics) require_canonical(t, "topic");
    for (const auto& c : countries) require_canonical(c, "country");
    std::set<std::string> rs;
    for (const auto& r : reps) {
        if (r.name.empty() || !rs.insert(r.name).second) throw ConfigError("synth: empty or duplicate rep_type");
        if (r.dim == 0) throw ConfigError("synth: rep_type '" + r.name + "' has zero dimension");
    }
    if (images_per_pair == 0) throw ConfigError("synth: images_per_pair must be positive");
    if (high_images_per_topic == 0) throw ConfigError("synth: high_images_per_topic must be positive");
    if (images_per_pair_range) {
        const auto [lo, hi] = *images_per_pair_range;
        if (lo == 0 || lo > hi) throw ConfigError("synth: images_per_pair_range must satisfy 1 <= lo <= hi");
    }
    if (!std::isfinite(noise) || noise < 0.0) throw ConfigError("synth: noise scale must be finite and non-negative");

    const auto all = effective_pairs(*this);
    std::set<PairKey> pair_set(all.begin(), all.end());
    for (const auto& p : all)
        if (!ts.contains(p.topic) || !cs.contains(p.country))
            throw ConfigError(fmt::format("synth: pair ({}, {}) names an unknown topic or country", p.topic, p.country));
    auto need_pair = [&](const std::string& t, const std::string& c, const char* what) {
        if (!pair_set.contains({t, c})) throw ConfigError(fmt::format("synth: {} names unknown pair ({}, {})", what, t, c));
    };
    for (const auto& o : overrides) {
        need_pair(o.topic, o.country, "override");
        if (o.images == 0) throw ConfigError("synth: override image count must be positive");
    }
    std::set<PairKey> mirrored;
    for (const auto& m : mirrors) {
        need_pair(m.topic, m.country, "mirror");
        need_pair(m.of_topic, m.of_country, "mirror source");
        mirrored.insert({m.topic, m.country});
    }
    for (const auto& m : mirrors)
        if (mirrored.contains({m.of_topic, m.of_country}))
            throw ConfigError("synth: mirror chains are not supported");
    for (const auto& d : divergent) {
        need_pair(d.topic, d.country, "divergent entry");
        if (mirrored.contains({d.topic, d.country}))
            throw ConfigError("synth: a pair cannot be both mirrored and divergent");
        if (!(d.angle_deg >= 0.0 && d.angle_deg <= 180.0)) throw ConfigError("synth: angle_deg must lie in [0, 180]");
        if (d.toward && (!ts.contains(*d.toward) || *d.toward == d.topic))
            throw ConfigError("synth: 'toward' must name a different known topic");
        for (const auto& r : d.reps)
            if (!rs.contains(r)) throw ConfigError("synth: divergent entry names unknown rep_type '" + r + "'");
    }
}

std::vector<EmbeddingRecord> generate_synthetic_records(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto pairs = effective_pairs(spec);

    std::map<PairKey, std::size_t> counts;
    for (const auto& p : pairs) {
        std::size_t n = spec.images_per_pair;
        if (spec.images_per_pair_range) {
            const auto [lo, hi] = *spec.images_per_pair_range;
            auto rng = Rng::derive(seed, "count|" + p.topic + "|" + p.country);
            n = lo + static_cast<std::size_t>(rng.index(hi - lo + 1));
        }
        counts[p] = n;
    }
    for (const auto& o : spec.overrides) counts[{o.topic, o.country}] = o.images;

    std::vector<EmbeddingRecord> out;
    for (const auto& rep : spec.reps) {
        std::map<std::string, std::vector<double>> high;
        for (const auto& t : spec.topics) high[t] = gaussian_unit(Rng::derive(seed, "center|" + rep.name + "|" + t), rep.dim);

        auto direction = [&](const SynthSpec::Divergent& d) {
            const auto& h = high.at(d.topic);
            const auto group = d.group.empty() ? d.country : d.group;
            std::vector<double> v = d.toward ? high.at(*d.toward)
                                             : gaussian_unit(Rng::derive(seed, "dir|" + rep.name + "|" + d.topic + "|" + group), rep.dim);
            for (int pass = 0; pass < 2; ++pass) {
                const double proj = numeric::dot(v, h);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * h[i];
            }
            if (numeric::norm(v) < 1e-8) throw ConfigError("synth: displacement direction collapsed onto the topic center");
            return numeric::normalized(v);
        };

        std::map<PairKey, std::vector<double>> centers;
        for (const auto& p : pairs) centers[p] = high.at(p.topic);
        for (const auto& d : spec.divergent) {
            if (!d.reps.empty() && std::find(d.reps.begin(), d.reps.end(), rep.name) == d.reps.end()) continue;
            const auto& h = high.at(d.topic);
            const auto u = direction(d);
            const double a = d.angle_deg * std::numbers::pi / 180.0;
            std::vector<double> c(rep.dim);
            for (std::size_t i = 0; i < rep.dim; ++i) c[i] = std::cos(a) * h[i] + std::sin(a) * u[i];
            centers[{d.topic, d.country}] = std::move(c);
        }
        for (const auto& m : spec.mirrors) centers[{m.topic, m.country}] = centers.at({m.of_topic, m.of_country});

        auto emit = [&](const std::vector<double>& center, std::size_t n, const std::string& topic,
                        const std::optional<std::string>& country) {
            const auto label = country ? *country : std::string(kHighLabel);
            auto rng = Rng::derive(seed, "img|" + rep.name + "|" + topic + "|" + label);
            for (std::size_t i = 0; i < n; ++i) {
                EmbeddingRecord r;
                r.image_id = fmt::format("{}/{}/{:05}", topic, label, i);
                r.dataset = country ? Dataset::low_resource : Dataset::high_resource;
                r.source = country ? "synthetic-low" : "synthetic-high";
                r.topic = topic;
                r.country = country;
                r.rep_type = rep.name;
                for (;;) {
                    r.vector = center;
                    if (spec.noise > 0.0)
                        for (auto& x : r.vector) x += spec.noise * rng.normal();
                    if (numeric::norm(r.vector) > 0.0) break;
                }
                out.push_back(std::move(r));
            }
        };

        for (const auto& t : spec.topics) emit(high.at(t), spec.high_images_per_topic, t, std::nullopt);
        for (const auto& p : pairs) emit(centers.at(p), counts.at(p), p.topic, p.country);
    }
    return out;
}

Store generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
    return Store::from_records(generate_synthetic_records(spec, seed));
}

SynthSpec SynthSpec::from_json(std::string_view text) {
    SynthSpec s;
    try {
        const auto j = json::parse(text);
        s.topics = j.at("topics").get<std::vector<std::string>>();
        s.countries = j.at("countries").get<std::vector<std::string>>();
        for (const auto& r : j.at("reps")) s.reps.push_back({r.at("name").get<std::string>(), r.at("dim").get<std::size_t>()});
        if (j.contains("pairs"))
            for (const auto& p : j["pairs"]) s.pairs.push_back({p.at("topic").get<std::string>(), p.at("country").get<std::string>()});
        s.images_per_pair = j.value("images_per_pair", s.images_per_pair);
        if (j.contains("images_per_pair_range")) {
            const auto r = j["images_per_pair_range"].get<std::vector<std::size_t>>();
            if (r.size() != 2) throw ConfigError("synth: images_per_pair_range needs two entries");
            s.images_per_pair_range = std::pair{r[0], r[1]};
        }
        s.high_images_per_topic = j.value("high_images_per_topic", s.high_images_per_topic);
        s.noise = j.value("noise", s.noise);
        if (j.contains("overrides"))
            for (const auto& o : j["overrides"])
                s.overrides.push_back({o.at("topic").get<std::string>(), o.at("country").get<std::string>(),
                                       o.at("images").get<std::size_t>()});
        if (j.contains("divergent"))
            for (const auto& d : j["divergent"]) {
                Divergent e;
                e.topic = d.at("topic").get<std::string>();
                e.country = d.at("country").get<std::string>();
                e.angle_deg = d.at("angle_deg").get<double>();
                e.group = d.value("group", std::string{});
                if (d.contains("toward")) e.toward = d["toward"].get<std::string>();
                e.reps = d.value("reps", std::vector<std::string>{});
                s.divergent.push_back(std::move(e));
            }
        if (j.contains("mirrors"))
            for (const auto& m : j["mirrors"])
                s.mirrors.push_back({m.at("topic").get<std::string>(), m.at("country").get<std::string>(),
                                     m.at("of_topic").get<std::string>(), m.at("of_country").get<std::string>()});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synth spec: ") + e.what());
    }
    s.validate();
    return s;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synth spec: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string SynthSpec::to_json() const {
    json j;
    j["topics"] = topics;
    j["countries"] = countries;
    j["reps"] = json::array();
    for (const auto& r : reps) j["reps"].push_back({{"name", r.name}, {"dim", r.dim}});
    if (!pairs.empty()) {
        j["pairs"] = json::array();
        for (const auto& p : pairs) j["pairs"].push_back({{"topic", p.topic}, {"country", p.country}});
    }
    j["images_per_pair"] = images_per_pair;
    if (images_per_pair_range) j["images_per_pair_range"] = {images_per_pair_range->first, images_per_pair_range->second};
    j["high_images_per_topic"] = high_images_per_topic;
    j["noise"] = noise;
    j["overrides"] = json::array();
    for (const auto& o : overrides) j["overrides"].push_back({{"topic", o.topic}, {"country", o.country}, {"images", o.images}});
    j["divergent"] = json::array();
    for (const auto& d : divergent) {
        json e{{"topic", d.topic}, {"country", d.country}, {"angle_deg", d.angle_deg}};
        if (!d.group.empty()) e["group"] = d.group;
        if (d.toward) e["toward"] = *d.toward;
        if (!d.reps.empty()) e["reps"] = d.reps;
        j["divergent"].push_back(std::move(e));
    }
    j["mirrors"] = json::array();
    for (const auto& m : mirrors)
        j["mirrors"].push_back({{"topic", m.topic}, {"country", m.country}, {"of_topic", m.of_topic}, {"of_country", m.of_country}});
    return j.dump(2);
}

}  // namespace geodiv
