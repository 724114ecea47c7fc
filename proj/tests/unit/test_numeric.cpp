// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "geodiv/error.hpp"
#include "geodiv/numeric.hpp"
#include "geodiv/rng.hpp"

using namespace geodiv;

TEST_CASE("pairwise sum matches naive sum on small inputs") {
    std::vector<double> xs{1, 2, 3, 4, 5, 6, 7};
    CHECK(numeric::pairwise_sum(xs) == 28.0);
    CHECK(numeric::pairwise_sum({}) == 0.0);
    CHECK(numeric::mean(xs) == 4.0);
}

TEST_CASE("pairwise sum keeps error small on many ones plus tiny terms") {
    std::vector<double> xs(1 << 20, 0.1);
    const double got = numeric::pairwise_sum(xs);
    CHECK(std::abs(got - 0.1 * (1 << 20)) < 1e-6);
}

TEST_CASE("pairwise_sum_rows sums columnwise") {
    std::vector<std::vector<double>> rows{{1, 2}, {3, 4}, {5, 6}};
    CHECK(numeric::pairwise_sum_rows(rows) == std::vector<double>{9, 12});
}

TEST_CASE("norm survives huge and tiny components") {
    std::vector<double> big{3e200, 4e200};
    CHECK(numeric::norm(big) == doctest::Approx(5e200));
    std::vector<double> small{3e-200, 4e-200};
    CHECK(numeric::norm(small) == doctest::Approx(5e-200));
}

TEST_CASE("normalized rejects the zero vector") {
    std::vector<double> z{0, 0, 0};
    CHECK_THROWS_AS(numeric::normalized(z), DomainError);
    std::vector<double> v{3, 4};
    const auto u = numeric::normalized(v);
    CHECK(u[0] == doctest::Approx(0.6));
    CHECK(u[1] == doctest::Approx(0.8));
}

TEST_CASE("median of odd and even counts") {
    CHECK(numeric::median({5, 1, 3}) == 3.0);
    CHECK(numeric::median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("rng is deterministic and derived streams differ") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    auto x = Rng::derive(7, "topic-a");
    auto y = Rng::derive(7, "topic-b");
    auto z = Rng::derive(7, "topic-a");
    const auto xv = x.next();
    CHECK(xv != y.next());
    CHECK(xv == z.next());
}

TEST_CASE("rng uniform and index stay in range") {
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(r.index(7) < 7);
    }
}

TEST_CASE("rng normal has roughly unit moments") {
    Rng r(3);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("shuffle yields a permutation") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    Rng r(9);
    r.shuffle(w);
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}
