#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bisim/transport.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace bisim;
using testing::Rng;

namespace {

void check_certificate(const MetricMatrix& h, const std::vector<double>& p, const std::vector<double>& q,
                       const TransportResult& r) {
    CHECK(std::abs(r.value - r.dual_value) <= 1e-9);
    const auto rows = r.plan.row_sums();
    const auto cols = r.plan.column_sums();
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::abs(rows[i] - p[i]) <= 1e-9);
        CHECK(std::abs(cols[i] - q[i]) <= 1e-9);
        for (std::size_t j = 0; j < p.size(); ++j) {
            CHECK(r.plan(i, j) >= 0.0);
            CHECK(r.potentials[i] - r.potentials[j] <= h(i, j) + 1e-9);
        }
    }
}

} // namespace

TEST_CASE("identical distributions cost nothing") {
    Rng rng(3);
    const auto h = testing::random_semimetric(rng, 4);
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const auto r = kantorovich(h, p, p);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-15));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.plan(i, i) == doctest::Approx(p[i]));
    }
    check_certificate(h, p, p, r);
}

TEST_CASE("point masses cost h(x, y)") {
    Rng rng(5);
    const auto h = testing::random_semimetric(rng, 5);
    for (std::size_t x = 0; x < 5; ++x) {
        for (std::size_t y = 0; y < 5; ++y) {
            std::vector<double> p(5, 0.0);
            std::vector<double> q(5, 0.0);
            p[x] = 1.0;
            q[y] = 1.0;
            const auto r = kantorovich(h, p, q);
            CHECK(r.value == doctest::Approx(h(x, y)).epsilon(1e-12));
            CHECK(r.plan(x, y) == 1.0);
            check_certificate(h, p, q, r);
            CHECK(testing::brute_force_kantorovich(h, p, q) == doctest::Approx(h(x, y)));
        }
    }
}

TEST_CASE("discrete cost on three points") {
    const auto h = discrete_metric(3);
    const std::vector<double> p{0.5, 0.5, 0.0};
    const std::vector<double> q{0.0, 0.5, 0.5};
    // Frozen from the vertex-enumeration oracle.
    CHECK(testing::brute_force_kantorovich(h, p, q) == doctest::Approx(0.5).epsilon(1e-12));
    const auto r = kantorovich(h, p, q);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));
    check_certificate(h, p, q, r);
}

TEST_CASE("zero-mass points keep their index") {
    const auto h = discrete_metric(4);
    const std::vector<double> p{0.0, 1.0, 0.0, 0.0};
    const std::vector<double> q{0.0, 0.0, 0.0, 1.0};
    const auto r = kantorovich(h, p, q);
    CHECK(r.plan.size() == 4);
    CHECK(r.plan(1, 3) == 1.0);
    CHECK(r.potentials.size() == 4);
    check_certificate(h, p, q, r);
}

TEST_CASE("malformed inputs are rejected") {
    const auto h = discrete_metric(2);
    CHECK_THROWS_AS(kantorovich(h, std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kantorovich(h, std::vector<double>{1.1, -0.1}, std::vector<double>{0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kantorovich(h, std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
    MetricMatrix bad(3);
    bad(0, 1) = bad(1, 0) = 1.0;
    bad(1, 2) = bad(2, 1) = 1.0;
    bad(0, 2) = bad(2, 0) = 3.0; // triangle inequality fails
    CHECK_THROWS_AS(kantorovich(bad, std::vector<double>{1, 0, 0}, std::vector<double>{0, 0, 1}),
                    std::invalid_argument);
}

TEST_CASE("brute force oracle limits") {
    const auto h = discrete_metric(6);
    std::vector<double> p(6, 1.0 / 6);
    CHECK_THROWS_AS(testing::brute_force_kantorovich(h, p, p), std::invalid_argument);
    const auto h3 = discrete_metric(3);
    const std::vector<double> u{0.2, 0.3, 0.5};
    CHECK(testing::brute_force_kantorovich(h3, u, u) == doctest::Approx(0.0));
}

TEST_CASE("solver agrees with vertex enumeration") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        const auto h = testing::random_semimetric(rng, n);
        const auto p = testing::random_distribution(rng, n);
        const auto q = testing::random_distribution(rng, n);
        const auto r = kantorovich(h, p, q);
        CHECK(std::abs(r.value - testing::brute_force_kantorovich(h, p, q)) <= 1e-9);
        CHECK(std::abs(kantorovich_distance(h, p, q) - r.value) <= 1e-12);
        check_certificate(h, p, q, r);
    }
}

TEST_CASE("Kantorovich distance is a semimetric on distributions") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
        const auto h = testing::random_semimetric(rng, n);
        const auto p = testing::random_distribution(rng, n);
        const auto q = testing::random_distribution(rng, n);
        const auto s = testing::random_distribution(rng, n);
        const double pq = kantorovich(h, p, q).value;
        CHECK(std::abs(pq - kantorovich(h, q, p).value) <= 1e-8);
        CHECK(kantorovich(h, p, s).value <= pq + kantorovich(h, q, s).value + 1e-8);
    }
}

TEST_CASE("Kantorovich distance is monotone in the cost") {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
        const auto h = testing::random_semimetric(rng, n);
        // h + discrete metric scaled is a pointwise larger semimetric.
        const double bump = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
        MetricMatrix larger = h;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                larger(i, j) += i == j ? 0.0 : bump;
            }
        }
        const auto p = testing::random_distribution(rng, n);
        const auto q = testing::random_distribution(rng, n);
        CHECK(kantorovich(h, p, q).value <= kantorovich(larger, p, q).value + 1e-9);
    }
}

TEST_CASE("total_variation") {
    CHECK(total_variation(std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.8}) == doctest::Approx(0.3));
    CHECK(total_variation(std::vector<double>{1, 0, 0}, std::vector<double>{0, 0, 1}) == 1.0);
    CHECK(total_variation(std::vector<double>{0.3, 0.7}, std::vector<double>{0.3, 0.7}) == 0.0);
    CHECK_THROWS_AS(total_variation(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("discrete cost reproduces total variation") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const auto p = testing::random_distribution(rng, n);
        const auto q = testing::random_distribution(rng, n);
        CHECK(std::abs(kantorovich(discrete_metric(n), p, q).value - total_variation(p, q)) <= 1e-9);
    }
}

TEST_CASE("quotient_total_variation") {
    const std::vector<double> p{0.4, 0.1, 0.5};
    const std::vector<double> q{0.1, 0.4, 0.5};
    SUBCASE("single block") { CHECK(quotient_total_variation(p, q, Partition::single_block(3)) == 0.0); }
    SUBCASE("singletons") {
        CHECK(quotient_total_variation(p, q, Partition::singletons(3)) == doctest::Approx(total_variation(p, q)));
    }
    SUBCASE("blocks {0,1},{2}") {
        const Partition part({0, 0, 1});
        CHECK(testing::brute_force_block_tv(p, q, part) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(quotient_total_variation(p, q, part) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("partition must cover the support") {
        CHECK_THROWS_AS(quotient_total_variation(p, q, Partition::singletons(2)), std::invalid_argument);
    }
}

TEST_CASE("quotient total variation equals transport under the block cost") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        const auto part = testing::random_partition(rng, n, 4);
        const auto p = testing::random_distribution(rng, n);
        const auto q = testing::random_distribution(rng, n);
        const double tv = quotient_total_variation(p, q, part);
        CHECK(std::abs(tv - testing::brute_force_block_tv(p, q, part)) <= 1e-9);
        CHECK(std::abs(tv - kantorovich(quotient_discrete_metric(part), p, q).value) <= 1e-9);
    }
}
