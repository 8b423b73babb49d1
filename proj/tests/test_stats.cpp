#include <cmath>

#include "doctest.h"
#include "lpplab/env.hpp"
#include "lpplab/stats.hpp"
#include "oracles.hpp"

using namespace lpplab;

namespace {

EmpiricalPmf geo_draws(double alpha, int n, std::uint64_t seed) {
    RandomStream rng(seed);
    EmpiricalPmf e;
    for (int i = 0; i < n; ++i) e.add(rng.geometric(alpha));
    return e;
}

}  // namespace

TEST_CASE("empirical pmf bookkeeping") {
    EmpiricalPmf a;
    a.add(PmfKey{1, 2});
    a.add(PmfKey{1, 3}, 3);
    CHECK(a.total() == 4);
    CHECK(a.dimension() == 2);
    CHECK(a.count({1, 3}) == 3);
    CHECK(a.probability({1, 2}) == doctest::Approx(0.25));
    CHECK(a.probability({9, 9}) == 0.0);
    const auto m = a.marginal(1);
    CHECK(m.count({3}) == 3);
    EmpiricalPmf b;
    b.add(PmfKey{1, 2});
    a.merge(b);
    CHECK(a.count({1, 2}) == 2);
    CHECK_THROWS(a.add(PmfKey{1}));
    CHECK_THROWS(EmpiricalPmf().probability({0}));
}

TEST_CASE("total variation") {
    const auto a = geo_draws(0.5, 100000, 1);
    CHECK(tv_distance(a, a) == 0.0);
    EmpiricalPmf x, y;
    x.add(0, 5);
    y.add(1, 7);
    CHECK(tv_distance(x, y) == 1.0);
    CHECK(tv_distance(a, geo_draws(0.5, 100000, 2)) < 0.01);
    ExactPmf geo;
    for (std::int64_t k = 0; k < 60; ++k) geo[{k}] = oracle::geometric_pmf(0.5, k);
    CHECK(tv_distance(a, geo) < 0.01);
    CHECK(tv_distance(geo, geo) == 0.0);
    CHECK(total_mass(geo) == doctest::Approx(1.0));
    // Hand-computed: {0: .5, 1: .5} vs {0: .25, 2: .75} -> (.25 + .5 + .75) / 2.
    CHECK(tv_distance(ExactPmf{{{0}, .5}, {{1}, .5}}, ExactPmf{{{0}, .25}, {{2}, .75}}) == doctest::Approx(0.75));
}

TEST_CASE("max marginal TV picks the worst coordinate") {
    EmpiricalPmf a, b;
    a.add(PmfKey{0, 0}), a.add(PmfKey{0, 1});
    b.add(PmfKey{0, 0}), b.add(PmfKey{0, 0});
    CHECK(max_marginal_tv(a, b) == doctest::Approx(0.5));
    const ExactPmf e{{{0, 0}, 1.0}};
    CHECK(max_marginal_tv(a, e) == doctest::Approx(0.5));
    CHECK(marginal(ExactPmf{{{1, 2}, .5}, {{3, 2}, .5}}, 1).at({2}) == 1.0);
}

TEST_CASE("chi-square tests") {
    const auto a = geo_draws(0.5, 100000, 3);
    CHECK(chi2_two_sample(a, a).p_value == doctest::Approx(1.0));
    CHECK(chi2_two_sample(a, geo_draws(0.6, 100000, 4)).p_value < 1e-6);
    int small = 0;
    for (std::uint64_t r = 0; r < 100; ++r)
        small += chi2_two_sample(geo_draws(0.5, 20000, 100 + 2 * r), geo_draws(0.5, 20000, 101 + 2 * r)).p_value < 1e-3;
    CHECK(small <= 1);
    ExactPmf geo;
    for (std::int64_t k = 0; k < 60; ++k) geo[{k}] = oracle::geometric_pmf(0.5, k);
    CHECK(chi2_goodness_of_fit(a, geo).p_value > 1e-3);
    ExactPmf wrong;
    for (std::int64_t k = 0; k < 60; ++k) wrong[{k}] = oracle::geometric_pmf(0.55, k);
    CHECK(chi2_goodness_of_fit(a, wrong).p_value < 1e-6);
    const auto fn = chi2_goodness_of_fit(a, [](const PmfKey& k) { return oracle::geometric_pmf(0.5, k[0]); });
    CHECK(fn.p_value > 1e-3);
    EmpiricalPmf one;
    one.add(0, 10);
    const auto r = chi2_two_sample(one, one);
    CHECK(r.p_value == 1.0);
    CHECK_FALSE(r.warning.empty());
}

TEST_CASE("chi-square survival matches known quantiles") {
    CHECK(chi2_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_survival(9.487729036781154, 4) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_survival(0.0, 3) == 1.0);
    CHECK(chi2_survival(2.0, 2) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("mean confidence interval") {
    CHECK(mean_ci({2.0, 2.0, 2.0}).halfwidth == 0.0);
    CHECK(mean_ci({0.0, 2.0}).mean == 1.0);
    const auto two = mean_ci({0.0, 2.0});
    CHECK(two.std_error == doctest::Approx(1.0));
    CHECK(two.halfwidth == doctest::Approx(3.0));
    RandomStream rng(6);
    std::vector<double> v;
    for (int i = 0; i < 1000000; ++i) v.push_back(double(rng.geometric(0.25)));
    const auto ci = mean_ci(v);
    CHECK(std::abs(ci.mean - 1.0 / 3.0) <= ci.halfwidth);
    CHECK_THROWS(mean_ci({1.0}));
}
