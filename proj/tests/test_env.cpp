#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "lpplab/env.hpp"
#include "oracles.hpp"

using namespace lpplab;

TEST_CASE("model parameters are validated") {
    CHECK_NOTHROW(ModelParams(0.5, 0.0));
    CHECK_NOTHROW(ModelParams(0.5, 1.99));
    CHECK_THROWS_AS(ModelParams(0.5, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("derived parameters") {
    const ModelParams low(0.5, 0.5);
    CHECK(low.r_c() == 1.0);
    CHECK(low.xi_max() == 1.0);
    CHECK(low.diagonal_alpha() == doctest::Approx(0.25));
    CHECK(low.bulk_alpha() == doctest::Approx(0.25));
    const ModelParams high(0.5, 1.6);
    CHECK(high.r_c() == 1.6);
    CHECK(high.xi_max() == doctest::Approx(std::pow(0.2 / 1.1, 2)));
}

TEST_CASE("lattice sites") {
    CHECK(LatticeSite{2, 1}.in_half_space());
    CHECK_FALSE(LatticeSite{1, 2}.in_half_space());
    CHECK(LatticeSite{3, 3}.on_diagonal());
}

TEST_CASE("geometric inverse cdf") {
    CHECK(geo_inverse_cdf(0.0, 0.3) == 0);
    CHECK(geo_inverse_cdf(0.5, 0.9) == 0);
    CHECK(geo_inverse_cdf(0.5, 0.4) == 1);
    CHECK(geo_inverse_cdf(0.5, 0.2) == 2);
    CHECK_THROWS(geo_inverse_cdf(1.0, 0.5));
    CHECK_THROWS(geo_inverse_cdf(0.5, 0.0));
    CHECK_THROWS(geo_inverse_cdf(0.5, 1.0));
}

TEST_CASE("geometric table agrees with the logarithm formula") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (double alpha : {0.05, 0.25, 0.5, 0.8, 0.97}) {
        const GeometricTable table(alpha);
        for (int t = 0; t < 20000; ++t) {
            double u = uni(gen);
            if (u <= 0.0) continue;
            REQUIRE(table(u) == geo_inverse_cdf(alpha, u));
        }
        // At and around the thresholds alpha^k.
        for (int k = 1; k < 40; ++k) {
            const double a = std::pow(alpha, k);
            if (a < 1e-300) break;
            for (double u : {a, std::nextafter(a, 0.0), std::nextafter(a, 1.0)})
                if (u > 0.0 && u < 1.0) REQUIRE(table(u) == geo_inverse_cdf(alpha, u));
        }
        CHECK(table(1e-300) == geo_inverse_cdf(alpha, 1e-300));
    }
}

TEST_CASE("random stream geometric draws have the right law") {
    RandomStream rng(42);
    const double alpha = 0.4;
    const int N = 200000;
    std::map<std::int64_t, int> counts;
    for (int i = 0; i < N; ++i) ++counts[rng.geometric(alpha)];
    double tv = 0.0;
    for (std::int64_t k = 0; k < 30; ++k)
        tv += std::abs(counts[k] / double(N) - oracle::geometric_pmf(alpha, k));
    CHECK(0.5 * tv < 0.01);
}

TEST_CASE("counter-based streams are deterministic and copyable") {
    RandomStream a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    RandomStream c = a;
    CHECK(c() == a());
    CHECK(RandomStream(7, 3)() == RandomStream(7, 3)());
    CHECK(RandomStream(7)() != RandomStream(8)());
    const double u = RandomStream(9).uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("site hashing and seed derivation") {
    CHECK(site_bits(1, 2, 3) == site_bits(1, 2, 3));
    CHECK(site_bits(1, 2, 3) != site_bits(1, 3, 2));
    CHECK(site_bits(1, 2, 3, 0) != site_bits(1, 2, 3, 1));
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(5, i));
    CHECK(seeds.size() == 1000);
    CHECK(bits_to_uniform(0) > 0.0);
    CHECK(bits_to_uniform(~0ULL) < 1.0);
}

TEST_CASE("weight field") {
    const ModelParams p(0.5, 1.6);
    const WeightField f(p, 3);
    CHECK_THROWS_AS(f.weight_at({0, 1}), std::invalid_argument);
    CHECK(f.parameter_at({4, 4}) == doctest::Approx(0.8));
    CHECK(f.parameter_at({5, 4}) == doctest::Approx(0.25));
    CHECK(f.weight_at({5, 2}) == f.weight(5, 2));
    CHECK(WeightField(p, 3).weight(10, 3) == f.weight(10, 3));

    // Means of Geo(alpha) are alpha / (1 - alpha).
    double diag = 0, bulk = 0;
    const int N = 100000;
    for (int k = 0; k < N; ++k) {
        diag += double(f.weight(k, k));
        bulk += double(f.weight(k + 1, k));
    }
    CHECK(diag / N == doctest::Approx(4.0).epsilon(0.03));
    CHECK(bulk / N == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("weight grid copies a field and rejects out-of-range access") {
    const WeightField f(ModelParams(0.5, 0.5), 8);
    const auto g = WeightGrid::sample(f, 0, 5, 0, 5);
    for (Coord j = 0; j <= 5; ++j)
        for (Coord i = j; i <= 5; ++i) CHECK(g.weight(i, j) == f.weight(i, j));
    CHECK_THROWS(g.weight(6, 0));
    WeightGrid h(0, 2, 0, 2);
    h.set(2, 1, 7);
    CHECK(h.weight(2, 1) == 7);
}

TEST_CASE("inhomogeneous field") {
    const ModelParams p(0.5, 0.5);
    const InhomogeneousField f(p, {1.5, 1.2}, 0.0, 4);
    CHECK(f.m() == 2);
    CHECK(f.extended_s(1) == doctest::Approx(1.5));
    CHECK(f.extended_s(2) == doctest::Approx(1.2));
    CHECK(f.extended_s(3) == doctest::Approx(1.0 / 1.2));
    CHECK(f.extended_s(4) == doctest::Approx(1.0 / 1.5));
    CHECK(f.extended_s(5) == doctest::Approx(0.5));
    CHECK(f.start_vertex(1) == LatticeSite{4, 1});
    CHECK(f.start_vertex(2) == LatticeSite{3, 2});
    CHECK(f.is_start_vertex({4, 1}));
    CHECK(f.weight_at({4, 1}) == 0);
    CHECK(f.weight_at({3, 2}) == 0);
    // Bulk parameter s_i s_j; diagonal c s_r.
    CHECK(f.parameter_at({5, 3}) == doctest::Approx(0.5 * (1.0 / 1.2)));
    CHECK(f.parameter_at({3, 3}) == doctest::Approx(0.5 / 1.2));
    CHECK(f.parameter_at({2, 2}) == doctest::Approx(0.5 * 1.2));
    CHECK_THROWS(f.parameter_at({2, 1}));  // 1.5 * 1.2 >= 1 off the start vertices
    CHECK_THROWS(InhomogeneousField(p, {1.2, 1.5}, 0.0, 1));
    CHECK_THROWS(InhomogeneousField(p, {2.5}, 0.0, 1));
    CHECK(inhom_weight_at(p, {1.5, 1.2}, 0.0, {6, 3}, 4) == f.weight_at({6, 3}));
}
