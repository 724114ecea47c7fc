// SPDX-License-Identifier: Apache-2.0
#include "geodiv/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "geodiv/csv.hpp"
#include "geodiv/error.hpp"
#include "geodiv/numeric.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/topic_map.hpp"

namespace geodiv::geo {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_range(LatLon p) {
    if (!std::isfinite(p.lat_deg) || !std::isfinite(p.lon_deg) || p.lat_deg < -90.0 || p.lat_deg > 90.0 ||
        p.lon_deg < -180.0 || p.lon_deg > 180.0)
        throw DomainError(fmt::format("coordinate out of range: ({}, {})", p.lat_deg, p.lon_deg));
}

}  // namespace

double great_circle_km(LatLon a, LatLon b) {
    check_range(a);
    check_range(b);
    const double p1 = a.lat_deg * kDeg, p2 = b.lat_deg * kDeg;
    const double dp = p2 - p1, dl = (b.lon_deg - a.lon_deg) * kDeg;
    const double h = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kMeanEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

GeodesicDistance vincenty_inverse(LatLon a, LatLon b) {
    check_range(a);
    check_range(b);
    constexpr double f = kWgs84F;
    constexpr double A = kWgs84A;
    constexpr double B = A * (1.0 - f);
    constexpr double tolerance = 1e-12;
    constexpr int max_iterations = 200;

    const double L = std::remainder((b.lon_deg - a.lon_deg) * kDeg, 2.0 * std::numbers::pi);
    const double U1 = std::atan((1.0 - f) * std::tan(a.lat_deg * kDeg));
    const double U2 = std::atan((1.0 - f) * std::tan(b.lat_deg * kDeg));
    const double sinU1 = std::sin(U1), cosU1 = std::cos(U1);
    const double sinU2 = std::sin(U2), cosU2 = std::cos(U2);

    double lambda = L;
    double sin_sigma = 0, cos_sigma = 0, sigma = 0, cos2_alpha = 0, cos_2sigma_m = 0;
    for (int it = 1; it <= max_iterations; ++it) {
        const double sin_l = std::sin(lambda), cos_l = std::cos(lambda);
        const double t1 = cosU2 * sin_l;
        const double t2 = cosU1 * sinU2 - sinU1 * cosU2 * cos_l;
        sin_sigma = std::sqrt(t1 * t1 + t2 * t2);
        if (sin_sigma == 0.0) return {0.0, false, it};  // coincident points
        cos_sigma = sinU1 * sinU2 + cosU1 * cosU2 * cos_l;
        sigma = std::atan2(sin_sigma, cos_sigma);
        const double sin_alpha = cosU1 * cosU2 * sin_l / sin_sigma;
        cos2_alpha = 1.0 - sin_alpha * sin_alpha;
        cos_2sigma_m = cos2_alpha != 0.0 ? cos_sigma - 2.0 * sinU1 * sinU2 / cos2_alpha : 0.0;
        const double C = f / 16.0 * cos2_alpha * (4.0 + f * (4.0 - 3.0 * cos2_alpha));
        const double prev = lambda;
        lambda = L + (1.0 - C) * f * sin_alpha *
                         (sigma + C * sin_sigma * (cos_2sigma_m + C * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
        if (!std::isfinite(lambda) || std::abs(lambda) > std::numbers::pi) break;
        if (std::abs(lambda - prev) < tolerance) {
            const double u2 = cos2_alpha * (A * A - B * B) / (B * B);
            const double k1 = 1.0 + u2 / 16384.0 * (4096.0 + u2 * (-768.0 + u2 * (320.0 - 175.0 * u2)));
            const double k2 = u2 / 1024.0 * (256.0 + u2 * (-128.0 + u2 * (74.0 - 47.0 * u2)));
            const double c2 = cos_2sigma_m * cos_2sigma_m;
            const double delta_sigma =
                k2 * sin_sigma *
                (cos_2sigma_m + k2 / 4.0 *
                                    (cos_sigma * (-1.0 + 2.0 * c2) -
                                     k2 / 6.0 * cos_2sigma_m * (-3.0 + 4.0 * sin_sigma * sin_sigma) * (-3.0 + 4.0 * c2)));
            return {B * k1 * (sigma - delta_sigma) / 1000.0, false, it};
        }
    }
    return {great_circle_km(a, b), true, max_iterations};
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("pearson: series lengths differ");
    if (x.size() < 2) throw UndefinedCorrelationError("pearson: need at least two points");
    const double mx = numeric::mean(x), my = numeric::mean(y);
    std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy[i] = dx * dy;
        sxx[i] = dx * dx;
        syy[i] = dy * dy;
    }
    const double vx = numeric::pairwise_sum(sxx), vy = numeric::pairwise_sum(syy);
    if (vx == 0.0 || vy == 0.0) throw UndefinedCorrelationError("pearson: constant series");
    const double r = numeric::pairwise_sum(sxy) / (std::sqrt(vx) * std::sqrt(vy));
    return std::clamp(r, -1.0, 1.0);
}

void CapitalTable::add(Capital c) {
    check_range(c.location);
    auto key = canonical_topic(c.country);
    if (key.empty()) throw ConfigError("capitals: empty country name");
    c.country = key;
    if (!entries_.emplace(key, std::move(c)).second) throw ConfigError("capitals: duplicate country '" + key + "'");
}

const Capital* CapitalTable::find(std::string_view country) const {
    auto it = entries_.find(canonical_topic(country));
    return it == entries_.end() ? nullptr : &it->second;
}

CapitalTable CapitalTable::from_csv(std::string_view text) {
    CapitalTable t;
    std::size_t line_no = 0, pos = 0;
    bool header = false;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        const auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto f = csv::split_line(line);
        if (!header) {
            if (f.size() != 4 || f[0] != "country" || f[1] != "capital" || f[2] != "lat" || f[3] != "lon")
                throw ConfigError("capitals: header must be 'country,capital,lat,lon'");
            header = true;
            continue;
        }
        if (f.size() != 4) throw ConfigError(fmt::format("capitals: line {}: expected 4 fields", line_no));
        try {
            std::size_t used = 0;
            const double lat = std::stod(f[2], &used);
            if (used != f[2].size()) throw std::invalid_argument("lat");
            const double lon = std::stod(f[3], &used);
            if (used != f[3].size()) throw std::invalid_argument("lon");
            t.add({f[0], f[1], {lat, lon}});
        } catch (const std::logic_error&) {
            throw ConfigError(fmt::format("capitals: line {}: malformed coordinate", line_no));
        } catch (const DomainError& e) {
            throw ConfigError(fmt::format("capitals: line {}: {}", line_no, e.what()));
        }
    }
    if (!header) throw ConfigError("capitals: empty file");
    return t;
}

CapitalTable CapitalTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open capitals file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

CorrelationReport geo_visual_correlation(const SimilarityEngine& engine, const CapitalTable& capitals) {
    const auto grids = engine.all_cross_country_grids();

    std::map<std::pair<std::string, std::string>, std::vector<double>> shared;
    for (const auto& [topic, grid] : grids) {
        const auto& m = grid.averaged;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); ++j)
                if (const auto v = m.at(i, j)) shared[{m.countries()[i], m.countries()[j]}].push_back(*v);
    }

    CorrelationReport report;
    std::set<std::string> involved;
    for (const auto& [key, _] : shared) {
        involved.insert(key.first);
        involved.insert(key.second);
    }
    for (const auto& c : involved)
        if (!capitals.find(c)) report.skipped_countries.push_back(c);

    for (const auto& [key, values] : shared) {
        const auto* ca = capitals.find(key.first);
        const auto* cb = capitals.find(key.second);
        if (!ca || !cb) continue;
        const auto d = vincenty_inverse(ca->location, cb->location);
        report.observations.push_back({key.first, key.second, d.km, numeric::mean(values), values.size(), d.fallback});
    }
    if (report.observations.empty()) throw InsufficientDataError("geo correlation: no country pairs with shared topics and known capitals");

    std::vector<double> dist, sim;
    for (const auto& o : report.observations) {
        dist.push_back(o.distance_km);
        sim.push_back(o.similarity);
    }
    report.global_r = pearson(dist, sim);
    report.n_pairs = report.observations.size();

    for (const auto& c : involved) {
        CountryCorrelation cc{c, std::nullopt, 0, capitals.find(c) == nullptr};
        std::vector<double> x, y;
        for (const auto& o : report.observations) {
            if (o.country_a != c && o.country_b != c) continue;
            x.push_back(o.distance_km);
            y.push_back(o.similarity);
        }
        cc.n_pairs = x.size();
        if (x.size() >= 2) {
            try {
                cc.r = pearson(x, y);
            } catch (const UndefinedCorrelationError&) {
            }
        }
        report.per_country.push_back(std::move(cc));
    }
    return report;
}

SizeCorrelation size_similarity_correlation(const SimilarityEngine& engine) {
    const auto agg = engine.aggregate_scores();
    const auto& store = engine.store();
    const auto& rep = engine.reps().front();

    std::map<std::string, std::size_t> topic_images, country_images;
    for (const auto& [key, idx] : store.groups()) {
        if (key.is_high() || key.rep_type != rep) continue;
        topic_images[key.topic] += idx.size();
        country_images[*key.country] += idx.size();
    }

    SizeCorrelation out;
    auto correlate = [](const std::vector<SizeRow>& rows) -> std::optional<double> {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            x.push_back(static_cast<double>(r.images));
            y.push_back(r.score);
        }
        try {
            return pearson(x, y);
        } catch (const UndefinedCorrelationError&) {
            return std::nullopt;
        }
    };
    for (const auto& e : agg.topics) out.topics.push_back({e.name, topic_images[e.name], e.score});
    for (const auto& e : agg.countries) out.countries.push_back({e.name, country_images[e.name], e.score});
    out.topic_r = correlate(out.topics);
    out.country_r = correlate(out.countries);
    return out;
}

}  // namespace geodiv::geo
