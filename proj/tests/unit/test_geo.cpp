// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "geodiv/error.hpp"
#include "geodiv/geo.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/synth.hpp"
#include "oracles.hpp"
#include "planted_geo.hpp"
#include "records.hpp"

using namespace geodiv;
using geo::LatLon;

TEST_CASE("coincident points are exactly zero apart") {
    for (LatLon p : {LatLon{0, 0}, LatLon{36.8, 10.18}, LatLon{-89.9, 179.9}, LatLon{90, 0}}) {
        const auto d = geo::vincenty_inverse(p, p);
        CHECK(d.km == 0.0);
        CHECK_FALSE(d.fallback);
    }
}

TEST_CASE("known distances") {
    const auto caps = geo::CapitalTable::load(GEODIV_DATA_DIR "/capitals.csv");
    const auto* tunis = caps.find("Tunisia");
    const auto* bolivia = caps.find("bolivia");
    REQUIRE(tunis);
    REQUIRE(bolivia);
    const double d = geo::vincenty_distance(tunis->location, bolivia->location);
    CHECK(std::abs(d - 9773.0) / 9773.0 < 0.03);
    // One degree of longitude on the equator.
    CHECK(geo::vincenty_distance({0, 0}, {0, 1}) == doctest::Approx(111.319491).epsilon(1e-6));
    // Pole to pole along a meridian: twice the quarter meridian.
    CHECK(geo::vincenty_distance({90, 0}, {-90, 0}) == doctest::Approx(20003.931458).epsilon(1e-7));
}

TEST_CASE("random pairs agree with an independent ellipsoidal formula") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1, 1), lon(-180, 180);
    int compared = 0;
    for (int k = 0; k < 1000; ++k) {
        const LatLon a{std::asin(u(gen)) * 180 / 3.141592653589793, lon(gen)};
        const LatLon b{std::asin(u(gen)) * 180 / 3.141592653589793, lon(gen)};
        const auto d = geo::vincenty_inverse(a, b);
        CHECK(d.km == doctest::Approx(geo::vincenty_distance(b, a)).epsilon(1e-9));
        if (d.fallback) continue;
        const double ref = oracle::andoyer_lambert_km(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg);
        CHECK(std::abs(d.km - ref) / ref < 0.005);
        ++compared;
    }
    CHECK(compared > 900);
}

TEST_CASE("near-antipodal points fall back without hanging") {
    const auto start = std::chrono::steady_clock::now();
    const auto d = geo::vincenty_inverse({0, 0}, {0.5, 179.7});
    CHECK(d.fallback);
    CHECK(d.km == doctest::Approx(geo::great_circle_km({0, 0}, {0.5, 179.7})));
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
    CHECK(geo::vincenty_inverse({0, 0}, {0, 180}).km > 19900);
}

TEST_CASE("spherical fallback satisfies the triangle inequality") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int k = 0; k < 500; ++k) {
        const LatLon a{lat(gen), lon(gen)}, b{lat(gen), lon(gen)}, c{lat(gen), lon(gen)};
        CHECK(geo::great_circle_km(a, c) <= geo::great_circle_km(a, b) + geo::great_circle_km(b, c) + 1e-6);
    }
}

TEST_CASE("out-of-range coordinates are rejected") {
    CHECK_THROWS_AS(geo::vincenty_inverse({91, 0}, {0, 0}), DomainError);
    CHECK_THROWS_AS(geo::vincenty_inverse({0, 0}, {0, -181}), DomainError);
    CHECK_THROWS_AS(geo::vincenty_inverse({std::nan(""), 0}, {0, 0}), DomainError);
}

TEST_CASE("pearson exact cases") {
    std::vector<double> x{1, 2, 3, 4, 5.5}, y, z;
    for (double v : x) {
        y.push_back(2 * v + 3);
        z.push_back(-v);
    }
    CHECK(std::abs(geo::pearson(x, y) - 1.0) < 1e-12);
    CHECK(std::abs(geo::pearson(x, z) + 1.0) < 1e-12);
}

TEST_CASE("pearson errors") {
    std::vector<double> x{1, 2, 3}, c{4, 4, 4}, shorter{1, 2};
    CHECK_THROWS_AS(geo::pearson(x, c), UndefinedCorrelationError);
    CHECK_THROWS_AS(geo::pearson(x, shorter), DomainError);
    std::vector<double> one{1};
    CHECK_THROWS_AS(geo::pearson(one, one), UndefinedCorrelationError);
}

TEST_CASE("pearson agrees with the two-pass reference and is affine invariant") {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> n;
    for (int k = 0; k < 20; ++k) {
        std::vector<double> x(1000), y(1000), xa(1000), ya(1000);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = n(gen);
            y[i] = 0.3 * x[i] + n(gen);
            xa[i] = 3.5 * x[i] - 7;
            ya[i] = 0.01 * y[i] + 100;
        }
        const double r = geo::pearson(x, y);
        CHECK(std::abs(r - oracle::pearson(x, y)) < 1e-12);
        CHECK(std::abs(geo::pearson(xa, ya) - r) < 1e-12);
    }
}

TEST_CASE("capitals csv") {
    const auto t = geo::CapitalTable::from_csv("country,capital,lat,lon\nChad,N'Djamena,12.1,15.0\n\n");
    CHECK(t.size() == 1);
    CHECK(t.find(" chad") != nullptr);
    CHECK_THROWS_AS(geo::CapitalTable::from_csv("name,lat,lon\n"), ConfigError);
    CHECK_THROWS_AS(geo::CapitalTable::from_csv("country,capital,lat,lon\nx,y,95,0\n"), ConfigError);
    CHECK_THROWS_AS(geo::CapitalTable::from_csv("country,capital,lat,lon\nx,y,abc,0\n"), ConfigError);
    CHECK_THROWS_AS(geo::CapitalTable::from_csv("country,capital,lat,lon\nx,y,1,0\nX,z,2,0\n"), ConfigError);
    const auto shipped = geo::CapitalTable::load(GEODIV_DATA_DIR "/capitals.csv");
    CHECK(shipped.size() >= 80);
}

TEST_CASE("planted monotone distance relation gives r = -1") {
    const auto caps = geo::CapitalTable::load(GEODIV_DATA_DIR "/capitals.csv");
    const std::vector<std::string> countries{"tunisia", "bolivia", "austria", "burundi", "argentina",
                                             "haiti",   "vietnam", "malawi",  "japan"};
    const auto store = planted::distance_store(caps, countries);
    const SimilarityEngine engine(store);
    const auto rep = geo::geo_visual_correlation(engine, caps);
    CHECK(rep.n_pairs == 36);
    CHECK(std::abs(rep.global_r + 1.0) < 1e-6);
    for (const auto& c : rep.per_country) {
        REQUIRE(c.r.has_value());
        CHECK(std::abs(*c.r + 1.0) < 1e-6);
        CHECK(c.n_pairs == 8);
    }
}

TEST_CASE("countries without capitals are skipped and reported") {
    auto caps = geo::CapitalTable::load(GEODIV_DATA_DIR "/capitals.csv");
    std::vector<EmbeddingRecord> rs;
    const std::vector<std::pair<std::string, double>> countries{{"chad", 0.1}, {"peru", 0.7}, {"mali", 2.0}, {"atlantis", 1.0}};
    for (const auto& [c, y] : countries) rec::fill(rs, "t", c, "clip", 2, {1.0, y});
    const auto store = Store::from_records(rs);
    const SimilarityEngine engine(store);
    const auto rep = geo::geo_visual_correlation(engine, caps);
    CHECK(rep.skipped_countries == std::vector<std::string>{"atlantis"});
    CHECK(rep.n_pairs == 3);
}

TEST_CASE("no valid pairs is an error") {
    geo::CapitalTable caps;
    std::vector<EmbeddingRecord> rs;
    rec::fill(rs, "t", "chad", "clip", 2, {1, 0});
    rec::fill(rs, "t", "peru", "clip", 2, {0, 1});
    const auto store = Store::from_records(rs);
    const SimilarityEngine engine(store);
    CHECK_THROWS_AS(geo::geo_visual_correlation(engine, caps), Error);
}

TEST_CASE("observations do not depend on enumeration order or threads") {
    const auto caps = geo::CapitalTable::load(GEODIV_DATA_DIR "/capitals.csv");
    const auto a = planted::distance_store(caps, {"chad", "peru", "mali", "japan", "kenya"});
    const auto b = planted::distance_store(caps, {"kenya", "japan", "mali", "peru", "chad"});
    const SimilarityEngine ea(a, {}, 1), eb(b, {}, 4);
    const auto ra = geo::geo_visual_correlation(ea, caps), rb = geo::geo_visual_correlation(eb, caps);
    CHECK(ra.global_r == doctest::Approx(rb.global_r).epsilon(1e-12));
    CHECK(ra.n_pairs == rb.n_pairs);
}

TEST_CASE("size and similarity are uncorrelated when independent by construction") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthSpec s;
        for (int i = 0; i < 1500; ++i) s.topics.push_back("t" + std::to_string(i));
        s.countries = {"a", "b", "c"};
        s.reps = {{"clip", 4}};
        s.images_per_pair_range = std::pair<std::size_t, std::size_t>{1, 40};
        s.high_images_per_topic = 1;
        s.noise = 0.0;
        std::mt19937_64 gen(seed);
        for (const auto& t : s.topics)
            s.divergent.push_back({t, "a", std::uniform_real_distribution<double>(0, 90)(gen), "", std::nullopt, {}});
        const auto store = generate_synthetic(s, seed);
        const SimilarityEngine engine(store);
        const auto sc = geo::size_similarity_correlation(engine);
        REQUIRE(sc.topic_r.has_value());
        CHECK(std::abs(*sc.topic_r) < 0.1);
        CHECK(sc.topics.size() == 1500);
        CHECK(sc.countries.size() == 3);
    }
}
