// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "corpora.hpp"
#include "geodiv/error.hpp"
#include "geodiv/similarity.hpp"
#include "geodiv/synth.hpp"
#include "oracles.hpp"
#include "records.hpp"

using namespace geodiv;

namespace {

std::vector<double> at_cos(double c) { return {c, std::sqrt(1 - c * c)}; }

// Topic "t": high pool at (1, 0), each listed country at the given cosine.
Store cosine_store(const std::vector<std::pair<std::string, double>>& countries, const std::string& rep = "clip") {
    std::vector<EmbeddingRecord> rs;
    rec::fill_high(rs, "t", rep, 2, {1, 0});
    for (const auto& [c, v] : countries) rec::fill(rs, "t", c, rep, 2, at_cos(v));
    return Store::from_records(rs);
}

SimilarityGrid grid_of(std::string rep, std::map<PairKey, double> cells) {
    SimilarityGrid g;
    g.rep_type = std::move(rep);
    g.cells = std::move(cells);
    return g;
}

}  // namespace

TEST_CASE("cosine basics") {
    std::vector<double> v{0.3, -1.2, 4.0};
    CHECK(cosine(v, v) == 1.0);
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{-2, 0}) == -1.0);
    CHECK_THROWS_AS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}), DomainError);
    CHECK_THROWS_AS(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}), DomainError);
}

TEST_CASE("cosine agrees with the extended-precision oracle") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> n;
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> a(1 + gen() % 64), b;
        for (auto& x : a) x = n(gen);
        for (std::size_t i = 0; i < a.size(); ++i) b.push_back(n(gen));
        worst = std::max(worst, std::abs(cosine(a, b) - oracle::cosine(a, b)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("centroid of identical members and of two axes") {
    std::vector<std::vector<double>> same(4, {3.0, 4.0});
    const auto c = centroid_of(same);
    CHECK(c.count == 4);
    CHECK(c.direction[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(c.direction[1] == doctest::Approx(0.8).epsilon(1e-15));

    std::vector<std::vector<double>> axes{{1, 0}, {0, 1}};
    const auto d = centroid_of(axes);
    CHECK(d.direction[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(d.direction[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("antipodal members give a degenerate centroid") {
    std::vector<std::vector<double>> v{{1, 2}, {-1, -2}};
    CHECK_THROWS_AS(centroid_of(v), DegenerateError);
}

TEST_CASE("centroids on random groups match the naive oracle") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> n;
    for (int k = 0; k < 500; ++k) {
        const std::size_t dim = 2 + gen() % 63, m = 1 + gen() % 40;
        std::vector<std::vector<double>> g(m, std::vector<double>(dim));
        for (auto& v : g)
            for (auto& x : v) x = n(gen);
        const auto got = centroid_of(g);
        CHECK(oracle::cosine(got.direction, oracle::centroid(g)) > 1 - 1e-9);
        CHECK(std::abs(oracle::ld_norm(got.direction) - 1) < 1e-9);
    }
}

TEST_CASE("centroid direction is invariant to positive member scaling") {
    std::vector<std::vector<double>> g{{1, 2, 3}, {-1, 0.5, 2}, {0.2, 0.2, -1}};
    auto scaled = g;
    for (auto& v : scaled)
        for (auto& x : v) x *= 1e6;
    const auto a = centroid_of(g), b = centroid_of(scaled);
    CHECK(cosine(a.direction, b.direction) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("store centroids respect the min-image threshold") {
    std::vector<EmbeddingRecord> rs;
    rec::fill(rs, "t", "c", "clip", 3, {1, 0});
    rec::fill(rs, "t", "d", "clip", 12, {1, 0});
    const auto s = filter_min_images(Store::from_records(rs), 10).store;
    CHECK(centroid(s, GroupKey::low("t", "d", "clip")).count == 12);
    CHECK_THROWS_AS(centroid(s, GroupKey::low("t", "c", "clip")), MissingGroupError);
}

TEST_CASE("low-high grid cells") {
    const auto s = cosine_store({{"same", 1.0}, {"sixty", 0.5}});
    const SimilarityEngine e(s);
    const auto g = e.low_high_grid("clip");
    CHECK(g.cells.at({"t", "same"}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.cells.at({"t", "sixty"}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("topics without high-resource data go to missing") {
    std::vector<EmbeddingRecord> rs;
    rec::fill_high(rs, "t", "clip", 2, {1, 0});
    rec::fill(rs, "t", "c", "clip", 2, {1, 0});
    rec::fill(rs, "u", "c", "clip", 2, {1, 0});
    const auto e_store = Store::from_records(rs);
    const SimilarityEngine e(e_store);
    const auto g = e.low_high_grid("clip");
    CHECK(g.cells.size() == 1);
    CHECK(g.missing == std::set<PairKey>{{"u", "c"}});
}

TEST_CASE("no high-resource data at all is a config error") {
    std::vector<EmbeddingRecord> rs;
    rec::fill(rs, "t", "c", "clip", 2, {1, 0});
    const auto e_store = Store::from_records(rs);
    const SimilarityEngine e(e_store);
    CHECK_THROWS_AS(e.low_high_grid("clip"), ConfigError);
}

TEST_CASE("threshold is the mean of defined cells") {
    CHECK(rep_threshold(grid_of("r", {{{"a", "x"}, 0.4}, {{"b", "x"}, 0.8}})) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(rep_threshold(grid_of("r", {{{"a", "x"}, 0.37}})) == 0.37);
    CHECK_THROWS(rep_threshold(grid_of("r", {})));
}

TEST_CASE("threshold matches direct summation on a synthetic grid") {
    const auto e_store = generate_synthetic(corpora::target_recovery(4).spec, 4);
    const SimilarityEngine e(e_store);
    const auto g = e.low_high_grid("clip");
    long double s = 0;
    for (const auto& [_, v] : g.cells) s += v;
    CHECK(std::abs(rep_threshold(g) - static_cast<double>(s / g.cells.size())) < 1e-12);
}

TEST_CASE("all-equal cells give no targets") {
    const auto g = grid_of("r", {{{"a", "x"}, 0.7}, {{"b", "x"}, 0.7}, {{"c", "x"}, 0.7}});
    const std::vector<SimilarityGrid> gs{g};
    CHECK(select_targets(gs).targets.empty());
}

TEST_CASE("targets are the intersection of per-rep selections") {
    const auto a = grid_of("a", {{{"t", "1"}, 0.1}, {{"t", "2"}, 0.2}, {{"t", "3"}, 0.9}, {{"t", "4"}, 1.0}});
    const auto b = grid_of("b", {{{"t", "1"}, 0.1}, {{"t", "2"}, 0.95}, {{"t", "3"}, 0.3}, {{"t", "4"}, 1.0}});
    const std::vector<SimilarityGrid> gs{a, b};
    const auto ts = select_targets(gs);
    CHECK(ts.targets == std::vector<PairKey>{{"t", "1"}});
    CHECK(ts.per_rep_thresholds.at("a") == doctest::Approx(0.55));
    CHECK(ts.headline_score({"t", "1"}) == doctest::Approx(0.1));
    for (const auto& t : ts.targets)
        for (const auto& [rep, thr] : ts.per_rep_thresholds) CHECK(ts.per_rep_scores.at(t).at(rep) < thr);
}

TEST_CASE("pairs missing under a rep are excluded, or rejected in strict mode") {
    const auto a = grid_of("a", {{{"t", "1"}, 0.1}, {{"t", "2"}, 0.9}, {{"t", "3"}, 0.2}});
    const auto b = grid_of("b", {{{"t", "1"}, 0.1}, {{"t", "2"}, 0.9}});
    const std::vector<SimilarityGrid> gs{a, b};
    const auto ts = select_targets(gs);
    CHECK(ts.excluded == std::vector<PairKey>{{"t", "3"}});
    CHECK(ts.targets == std::vector<PairKey>{{"t", "1"}});
    CHECK_THROWS_AS(select_targets(gs, {true, {}}), ConsistencyError);
}

TEST_CASE("lowering a threshold never adds a target") {
    const auto e_store = generate_synthetic(corpora::target_recovery(9, 6, 40.0, 0.2).spec, 9);
    const SimilarityEngine e(e_store);
    const auto gs = e.low_high_grids();
    const auto base = select_targets(gs);
    for (double scale : {0.99, 0.95, 0.9, 0.5}) {
        TargetOptions o;
        for (const auto& [rep, thr] : base.per_rep_thresholds) o.thresholds[rep] = thr * scale;
        const auto lower = select_targets(gs, o);
        for (const auto& t : lower.targets)
            CHECK(std::find(base.targets.begin(), base.targets.end(), t) != base.targets.end());
    }
}

TEST_CASE("rep agreement") {
    const auto a = grid_of("a", {{{"t", "1"}, 0.1}, {{"t", "2"}, 0.5}, {{"t", "3"}, 0.7}});
    auto neg = a;
    neg.rep_type = "n";
    for (auto& [_, v] : neg.cells) v = -v;
    auto same = a;
    same.rep_type = "s";
    const std::vector<SimilarityGrid> gs{a, same, neg};
    const auto t = rep_agreement(gs);
    REQUIRE(t.size() == 3);
    for (const auto& row : t) {
        REQUIRE(row.r.has_value());
        CHECK(row.shared_cells == 3);
        if (row.rep_a == "a" && row.rep_b == "s") CHECK(*row.r == doctest::Approx(1.0).epsilon(1e-12));
        if (row.rep_b == "n") CHECK(*row.r == doctest::Approx(-1.0).epsilon(1e-12));
    }
    const auto lone = grid_of("z", {{{"t", "1"}, 0.3}});
    const std::vector<SimilarityGrid> few{a, lone};
    const auto u = rep_agreement(few);
    CHECK_FALSE(u[0].r.has_value());
    CHECK_FALSE(u[0].error.empty());
    const std::vector<SimilarityGrid> one{a};
    CHECK_THROWS_AS(rep_agreement(one), DomainError);
}

TEST_CASE("cross-country grid averages the reps") {
    std::vector<EmbeddingRecord> rs;
    const std::vector<std::pair<std::string, double>> reps{{"r1", 0.2}, {"r2", 0.4}, {"r3", 0.9}};
    for (const auto& [rep, c] : reps) {
        rec::fill(rs, "t", "a", rep, 2, {1, 0});
        rec::fill(rs, "t", "b", rep, 2, at_cos(c));
    }
    const auto e_store = Store::from_records(rs);
    const SimilarityEngine e(e_store);
    const auto g = e.cross_country_grid("t");
    CHECK(*g.averaged.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*g.averaged.at(0, 0) == 1.0);
    for (const auto& [rep, m] : g.per_rep) {
        CHECK(*m.at(0, 1) == *m.at(1, 0));
        CHECK(*m.at(1, 1) == 1.0);
    }
}

TEST_CASE("identical centroids give off-diagonal 1 and the matrix is exactly symmetric") {
    const auto e_store = generate_synthetic(corpora::target_recovery(1).spec, 1);
    const SimilarityEngine e(e_store);
    for (const auto& [topic, g] : e.all_cross_country_grids()) {
        const auto& m = g.averaged;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j) {
                CHECK(m.at(i, j) == m.at(j, i));
                CHECK(*m.at(i, j) <= 1.0);
                CHECK(*m.at(i, j) >= -1.0);
            }
    }
    const auto same_store = cosine_store({{"a", 0.3}, {"b", 0.3}});
    const SimilarityEngine same(same_store);
    CHECK(*same.cross_country_grid("t").averaged.at(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cross-country grid needs two countries") {
    const auto e_store = cosine_store({{"a", 0.3}});
    const SimilarityEngine e(e_store);
    CHECK_THROWS_AS(e.cross_country_grid("t"), InsufficientDataError);
}

TEST_CASE("ranking order and tie-break") {
    std::vector<EmbeddingRecord> rs;
    rec::fill(rs, "t", "argentina", "clip", 2, {1, 0});
    rec::fill(rs, "t", "chile", "clip", 2, at_cos(0.8));
    rec::fill(rs, "t", "brazil", "clip", 2, at_cos(0.8));
    rec::fill(rs, "t", "peru", "clip", 2, at_cos(0.3));
    rec::fill(rs, "t", "mali", "clip", 2, at_cos(0.9));
    const auto e_store = Store::from_records(rs);
    const SimilarityEngine e(e_store);
    const auto r = e.rank_similar("t", "argentina");
    REQUIRE(r.ranked.size() == 4);
    CHECK(r.ranked[0].first == "mali");
    CHECK(r.ranked[1].first == "brazil");
    CHECK(r.ranked[2].first == "chile");
    CHECK(r.ranked[3].first == "peru");
    CHECK(r.ranked[1].second == r.ranked[2].second);
    for (const auto& [c, _] : r.ranked) CHECK(c != "argentina");
    const auto again = e.rank_similar("t", "argentina");
    CHECK(again.ranked == r.ranked);
    CHECK_THROWS_AS(e.rank_similar("t", "malawi"), MissingGroupError);
}

TEST_CASE("aggregate scores: one topic, two countries") {
    std::vector<EmbeddingRecord> rs;
    rec::fill(rs, "t", "a", "clip", 2, {1, 0});
    rec::fill(rs, "t", "b", "clip", 2, at_cos(0.65));
    const auto e_store = Store::from_records(rs);
    const SimilarityEngine e(e_store);
    const auto agg = e.aggregate_scores();
    REQUIRE(agg.countries.size() == 2);
    for (const auto& c : agg.countries) CHECK(c.score == doctest::Approx(0.65).epsilon(1e-12));
    REQUIRE(agg.topics.size() == 1);
    CHECK(agg.topics[0].score == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("aggregate scores sort ascending") {
    const auto e_store = generate_synthetic(corpora::target_recovery(6, 8, 50.0).spec, 6);
    const SimilarityEngine e(e_store);
    const auto agg = e.aggregate_scores();
    for (std::size_t i = 1; i < agg.countries.size(); ++i) CHECK(agg.countries[i - 1].score <= agg.countries[i].score);
    for (std::size_t i = 1; i < agg.topics.size(); ++i) CHECK(agg.topics[i - 1].score <= agg.topics[i].score);
}

TEST_CASE("results do not depend on thread count") {
    const auto s = generate_synthetic(corpora::target_recovery(7).spec, 7);
    const SimilarityEngine one(s, {}, 1), many(s, {}, 8);
    CHECK(one.low_high_grids().front().cells == many.low_high_grids().front().cells);
    const auto a = one.aggregate_scores(), b = many.aggregate_scores();
    REQUIRE(a.countries.size() == b.countries.size());
    for (std::size_t i = 0; i < a.countries.size(); ++i) CHECK(a.countries[i].score == b.countries[i].score);
}
