#include <cmath>

#include "doctest.h"
#include "lpplab/measures.hpp"
#include "oracles.hpp"

using namespace lpplab;

TEST_CASE("slope map and its inverse") {
    const ModelParams low(0.5, 0.5), high(0.5, 1.6);
    CHECK(slope_T(low, 1.0) == doctest::Approx(1.0));
    CHECK(slope_T(high, 1.6) == doctest::Approx(0.5 / 1.1));
    CHECK(slope_T_inverse(low, 1.0) == doctest::Approx(1.0));
    for (double s : {1.0, 1.2, 1.5, 1.9})
        CHECK(std::abs(slope_T_inverse(low, slope_T(low, s)) - s) < 1e-12);
    CHECK_THROWS(slope_T(low, 0.9));
    CHECK_THROWS(slope_T(low, 2.0));
    CHECK(evaluate_slope_maps(high, 1.6).branch == SlopeBranch::coexistence);
    CHECK(evaluate_slope_maps(high, 1.7).branch == SlopeBranch::generic);
    CHECK(on_coexistence_line(high, 1.6));
    CHECK_FALSE(on_coexistence_line(low, 0.5));
}

TEST_CASE("direction map and its inverse") {
    const ModelParams low(0.5, 0.5), high(0.5, 1.6);
    CHECK(direction_X(low, 1.0) == doctest::Approx(1.0));
    CHECK(direction_X(low, 0.3) == 1.0);
    CHECK(direction_X(high, 4.0) == doctest::Approx(std::pow(0.5 / 2.75, 2)).epsilon(1e-12));
    CHECK(direction_X(high, 4.0) == doctest::Approx(high.xi_max()).epsilon(1e-12));
    for (const auto& p : {low, high})
        for (double f : {0.01, 0.3, 0.7, 1.0}) {
            const double xi = f * p.xi_max();
            CHECK(std::abs(direction_X(p, direction_X_inverse(p, xi)) - xi) < 1e-12);
        }
    CHECK_THROWS(direction_X_inverse(low, 0.0));
    CHECK_THROWS(direction_X_inverse(high, 0.5));
}

TEST_CASE("Busemann parameter composes the inverse maps") {
    const ModelParams p(0.5, 0.0);
    const double s = busemann_parameter(p, 0.5);
    CHECK(direction_X(p, slope_T(p, s)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s >= p.r_c());
}

TEST_CASE("shape function") {
    const ModelParams zero(0.5, 0.0), low(0.5, 0.5), high(0.5, 1.6);
    CHECK(shape_rho(zero, 0.0) == doctest::Approx(1.0 / 3.0));
    CHECK(shape_rho(low, 1.0) == doctest::Approx(2.0));
    CHECK(shape_rho(zero, 0.5) == doctest::Approx(1.44281).epsilon(1e-5));
    CHECK(shape_rho(high, 1.0) == doctest::Approx(0.98 / 0.22).epsilon(1e-12));
    const double kstar = shape_branch_point(high);
    CHECK(kstar == doctest::Approx(std::pow(0.2 / 1.1, 2)));
    CHECK(std::abs(shape_rho(high, std::nextafter(kstar, 0.0)) - shape_rho(high, kstar)) < 1e-12);
    CHECK(shape_rho_fullspace(0.5, 0.25) == doctest::Approx((0.25 * 1.25 + 2 * 0.5 * 0.5) / 0.75));
    // Below the branch point the half-space and full-space values coincide.
    CHECK(shape_rho(high, 0.5 * kstar) == doctest::Approx(shape_rho_fullspace(0.5, 0.5 * kstar)));
    CHECK(shape_rho(low, 0.7) == doctest::Approx(shape_rho_fullspace(0.5, 0.7)));
    CHECK_THROWS(shape_rho(low, 1.1));
    CHECK_THROWS(shape_rho(low, -0.1));
}

namespace {

// argmax over a grid of xi -> theta xi + rho(1 - xi), and the set where the value is within tol of max.
std::pair<double, double> grid_maximisers(const ModelParams& p, double theta, double tol) {
    double best = -1e300;
    std::vector<double> v;
    for (int i = 0; i <= 10000; ++i) {
        const double xi = i * 1e-4;
        v.push_back(theta * xi + shape_rho(p, 1.0 - xi));
        best = std::max(best, v.back());
    }
    double lo = 2, hi = -1;
    for (int i = 0; i <= 10000; ++i)
        if (v[std::size_t(i)] >= best - tol) lo = std::min(lo, i * 1e-4), hi = std::max(hi, i * 1e-4);
    return {lo, hi};
}

}  // namespace

TEST_CASE("maximiser interval agrees with grid search") {
    {
        const ModelParams p(0.5, 0.5);
        const auto iv = maximizer_interval(p, 1.0);
        CHECK(iv.singleton());
        CHECK(iv.lo == doctest::Approx(0.0));
        CHECK(grid_maximisers(p, 1.0, 1e-12).first == doctest::Approx(0.0));
    }
    {
        const ModelParams p(0.5, 0.0);
        const auto iv = maximizer_interval(p, 2.0);
        CHECK(iv.lo == doctest::Approx(0.84));
        const auto [lo, hi] = grid_maximisers(p, 2.0, 1e-7);
        CHECK(lo <= 0.84 + 1e-3);
        CHECK(hi >= 0.84 - 1e-3);
        CHECK(hi - lo < 0.01);
    }
    {
        const ModelParams p(0.5, 1.6);
        const auto iv = maximizer_interval(p, 4.0);
        CHECK(iv.lo == 0.0);
        CHECK(iv.hi == doctest::Approx(1.0 - 0.0330578).epsilon(1e-6));
        const auto [lo, hi] = grid_maximisers(p, 4.0, 1e-8);
        CHECK(lo == doctest::Approx(0.0));
        CHECK(hi == doctest::Approx(iv.hi).epsilon(2e-4));
    }
}

TEST_CASE("pmf oracle basics") {
    const ModelParams zero(0.5, 0.0);
    const auto pmf = pmf_mu_prefix(zero, 1.0, 1);
    CHECK(pmf.at({0}) == doctest::Approx(0.25).epsilon(1e-10));
    for (const auto& [p, s, K] : std::vector<std::tuple<ModelParams, double, int>>{
             {zero, 1.0, 3}, {ModelParams(0.5, 0.5), 1.2, 3}, {ModelParams(0.5, 1.6), 1.7, 2}}) {
        const double m = total_mass(pmf_mu_prefix(p, s, K));
        CHECK(m <= 1.0 + 1e-12);
        CHECK(m >= 1.0 - 1e-9);
    }
    const ModelParams co(0.5, 1.5);
    const auto geo = pmf_mu_prefix(co, 1.5, 1);
    for (std::int64_t k = 0; k < 10; ++k)
        CHECK(geo.at({k}) == doctest::Approx(oracle::geometric_pmf(1.0 / 3.0, k)).epsilon(1e-12));
    CHECK_THROWS(pmf_mu_prefix(zero, 1.0, 4));
}

TEST_CASE("pmf oracle matches direct enumeration of the defining formula") {
    // f(k) = S2(k) + (max_{l<=k}[S1(l) - S2(l-1)] - Y)^+ with truncated geometric variables.
    const double q = 0.3, c = 0.5, s = 1.1;
    const int T = 28;
    const auto table = [&](double a) {
        std::vector<double> t(T);
        for (int k = 0; k < T; ++k) t[std::size_t(k)] = oracle::geometric_pmf(a, k);
        return t;
    };
    const auto pa = table(q * s), pb = table(q / s), py = table(c / s);
    ExactPmf direct;
    for (int a1 = 0; a1 < T; ++a1)
        for (int a2 = 0; a2 < T; ++a2)
            for (int b1 = 0; b1 < T; ++b1)
                for (int b2 = 0; b2 < T; ++b2) {
                    const double w = pa[a1] * pa[a2] * pb[b1] * pb[b2];
                    if (w < 1e-18) continue;
                    const std::int64_t m1 = a1, m2 = std::max<std::int64_t>(m1, a1 + a2 - b1);
                    for (int y = 0; y < T; ++y) {
                        const std::int64_t f1 = b1 + std::max<std::int64_t>(m1 - y, 0);
                        const std::int64_t f2 = b1 + b2 + std::max<std::int64_t>(m2 - y, 0);
                        direct[{f1, f2}] += w * py[std::size_t(y)];
                    }
                }
    const auto exact = pmf_mu_prefix(ModelParams(q, c), s, 2);
    CHECK(tv_distance(direct, exact) < 1e-8);
}

TEST_CASE("sampler matches the pmf oracle") {
    const ModelParams p(0.5, 0.5);
    RandomStream rng(17);
    EmpiricalPmf emp;
    for (int i = 0; i < 200000; ++i) {
        const auto f = sample_mu(p, 1.2, 3, rng);
        REQUIRE(std::is_sorted(f.values.begin(), f.values.end()));
        emp.add(f.values);
    }
    const auto exact = pmf_mu_prefix(p, 1.2, 3);
    CHECK(max_marginal_tv(emp, exact) < 0.01);
    CHECK(chi2_goodness_of_fit(emp, exact).p_value > 1e-3);
}

TEST_CASE("sampler special cases") {
    RandomStream rng(3);
    // c = 0: f(1) = S1(1) + S2(1), so P(f(1) = 0) = (1 - q)(1 - q) at s = 1.
    int zeros = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) zeros += sample_mu(ModelParams(0.5, 0.0), 1.0, 1, rng).values[0] == 0;
    CHECK(zeros / double(N) == doctest::Approx(0.25).epsilon(0.03));
    // Coexistence: i.i.d. Geo(q/c) increments.
    EmpiricalPmf inc;
    for (int i = 0; i < N; ++i) {
        const auto f = sample_mu(ModelParams(0.5, 1.5), 1.5, 3, rng).values;
        inc.add(PmfKey{f[0], f[1] - f[0], f[2] - f[1]});
    }
    ExactPmf iid;
    for (std::int64_t a = 0; a < 40; ++a)
        for (std::int64_t b = 0; b < 40; ++b)
            for (std::int64_t c = 0; c < 40; ++c)
                iid[{a, b, c}] = oracle::geometric_pmf(1.0 / 3.0, a) * oracle::geometric_pmf(1.0 / 3.0, b) *
                                 oracle::geometric_pmf(1.0 / 3.0, c);
    CHECK(max_marginal_tv(inc, iid) < 0.01);
    CHECK(chi2_goodness_of_fit(inc, iid).p_value > 1e-3);
    CHECK_THROWS(sample_mu(ModelParams(0.5, 1.5), 1.4, 3, rng));
}

TEST_CASE("slope law of large numbers") {
    RandomStream rng(5);
    for (const auto& [p, s] : std::vector<std::pair<ModelParams, double>>{{ModelParams(0.5, 0.5), 1.2},
                                                                         {ModelParams(0.5, 1.5), 1.5}}) {
        double sum = 0;
        const int N = 2000, K = 2000;
        for (int i = 0; i < N; ++i) sum += double(sample_mu(p, s, K, rng).values.back()) / K;
        CHECK(sum / N == doctest::Approx(slope_T(p, s)).epsilon(0.02));
    }
}

TEST_CASE("joint sampler") {
    const ModelParams p(0.5, 0.5);
    RandomStream rng(21), rng2(22);
    SUBCASE("duplicates share rows and rows follow the caller order") {
        const auto j = sample_joint(p, {1.2, 1.5, 1.2}, 3, rng);
        CHECK(j.rows.size() == 3);
        CHECK(j.rows[0] == j.rows[2]);
        CHECK(j.s == std::vector<double>{1.2, 1.5, 1.2});
        for (const auto& r : j.rows) CHECK(std::is_sorted(r.begin(), r.end()));
    }
    SUBCASE("marginals of a two-parameter draw") {
        EmpiricalPmf a, b;
        for (int i = 0; i < 50000; ++i) {
            const auto j = sample_joint(p, {1.5, 1.2}, 2, rng);
            a.add(j.rows[0]);
            b.add(j.rows[1]);
        }
        CHECK(max_marginal_tv(a, pmf_mu_prefix(p, 1.5, 2)) < 0.02);
        CHECK(max_marginal_tv(b, pmf_mu_prefix(p, 1.2, 2)) < 0.02);
    }
    SUBCASE("small eps perturbation") {
        EmpiricalPmf a, b;
        for (int i = 0; i < 50000; ++i) {
            a.add(sample_joint(p, {1.2}, 1, rng).rows[0]);
            b.add(sample_joint(p, {1.2}, 1, rng2, 1e-3).rows[0]);
        }
        CHECK(tv_distance(a, b) < 0.02);
    }
    CHECK_THROWS(sample_joint(p, {}, 2, rng));
    CHECK_THROWS(sample_joint(p, {0.9}, 2, rng));
}
