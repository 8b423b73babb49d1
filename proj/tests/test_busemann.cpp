#include <cmath>

#include "doctest.h"
#include "lpplab/busemann.hpp"
#include "lpplab/measures.hpp"
#include "oracles.hpp"

using namespace lpplab;

TEST_CASE("Busemann source") {
    CHECK(busemann_source(0.5, 10) == LatticeSite{-5, -10});
    CHECK(busemann_source(0.33, 10) == LatticeSite{-3, -10});
    CHECK(busemann_source(1.0, 7) == LatticeSite{-7, -7});
    CHECK_THROWS(busemann_source(1.1, 7));
    CHECK_THROWS(busemann_source(0.5, 0));
}

TEST_CASE("Busemann slice increments are passage-time differences") {
    const WeightField field(ModelParams(0.5, 0.5), 12);
    const Coord n = 40, t = -3, K = 6;
    for (double xi : {0.25, 0.5, 1.0}) {
        const auto slice = busemann_slice(field, xi, n, t, K);
        REQUIRE(slice.increments.size() == std::size_t(K));
        const LatticeSite v = busemann_source(xi, n);
        for (Coord k = 1; k <= K; ++k)
            CHECK(slice.increments[std::size_t(k - 1)] ==
                  passage_time(field, v, {t + k, t}) - passage_time(field, v, {t + k - 1, t}));
    }
    CHECK_THROWS(busemann_slice(field, 0.0, n, t, K));
    CHECK_THROWS(busemann_slice(field, 0.5, n, -n, K));
}

TEST_CASE("xi monotonicity holds pathwise") {
    const ModelParams p(0.5, 0.5);
    std::size_t checks = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const WeightField field(p, seed);
        const auto rep = xi_monotonicity_check(field, 0.3, 0.7, 120, 0, 10);
        REQUIRE_MESSAGE(rep.ok, (rep.violations.empty() ? "" : rep.violations.front()));
        checks += rep.horizontal_checks + rep.vertical_checks + rep.recursion_checks;
        REQUIRE(xi_monotonicity_check(field, 0.5, 1.0, 120, 0, 10).ok);
    }
    CHECK(checks > 1000);
    // Equal directions give equal increments, so both orderings hold.
    const WeightField field(p, 99);
    const auto same = xi_monotonicity_check(field, 0.5, 0.5, 60, 0, 5);
    CHECK(same.ok);
    CHECK_THROWS(xi_monotonicity_check(field, 0.7, 0.3, 60, 0, 5));
}

TEST_CASE("pinning fraction") {
    const ModelParams strong(0.5, 1.9), none(0.5, 0.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const double f1 = pinning_fraction(WeightField(strong, seed), 1);
        CHECK((f1 == 0.0 || f1 == 0.5 || f1 == 1.0));
        const double r = pinning_fraction(WeightField(strong, seed), 200);
        const double l = pinning_fraction(WeightField(strong, seed), 200, TieBreak::leftmost);
        CHECK(r >= 0.0);
        CHECK(l <= 1.0);
        CHECK(l >= r);
        CHECK(r > 0.5);
        CHECK(pinning_fraction(WeightField(none, seed), 200) < 0.1);
    }
    CHECK_THROWS(pinning_fraction(WeightField(none, 1), 0));
}

TEST_CASE("geodesic geometry and local slope") {
    const std::vector<LatticeSite> path{{4, 2}, {3, 2}, {3, 1}, {2, 1}, {1, 1}, {1, 0}};
    CHECK(local_slope(path, 0, 2) == doctest::Approx(1.5));
    CHECK(local_slope(path, 1, 2) == doctest::Approx(1.0));
    CHECK_THROWS(local_slope(path, 2, 2));
    CHECK_THROWS(local_slope(path, 0, 5));

    const WeightField field(ModelParams(0.5, 0.0), 4);
    const auto g = busemann_geodesic(field, 0.5, 100);
    CHECK(g.front() == LatticeSite{0, 0});
    CHECK(g.back() == LatticeSite{-50, -100});
    CHECK(double(path_weight(field, g, -100)) == double(passage_time(field, {-50, -100}, {0, 0})));
}

TEST_CASE("direction estimates") {
    const ModelParams p(0.5, 0.0);
    double mid = 0, low = 0;
    const int reps = 12;
    for (int s = 0; s < reps; ++s) {
        mid += direction_estimate(WeightField(p, s), 0.5, 400);
        low += direction_estimate(WeightField(p, s), 0.02, 400);
    }
    CHECK(mid / reps == doctest::Approx(0.5).epsilon(0.2));
    CHECK(low / reps < 0.1);
    CHECK_THROWS(direction_estimate(WeightField(p, 0), 1.0, 400));
}

TEST_CASE("stationary increments have the predicted mean") {
    // Direction 1/2 at c = 0: W(1) should average the first-coordinate mean of the invariant law.
    const ModelParams p(0.5, 0.0);
    const double s = busemann_parameter(p, 0.5);
    double target = 0;
    for (const auto& [k, pr] : pmf_mu_prefix(p, s, 1)) target += double(k[0]) * pr;
    double sum = 0;
    const int reps = 600;
    for (int r = 0; r < reps; ++r) sum += double(busemann_slice(WeightField(p, r), 0.5, 300, 0, 1).increments[0]);
    CHECK(std::abs(sum / reps - target) < 0.25);
}
