#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "lpplab/cli.hpp"
#include "lpplab/experiments.hpp"
#include "lpplab/measures.hpp"
#include "lpplab/parallel.hpp"

using namespace lpplab;

namespace {

struct ThreadsEnv {
    explicit ThreadsEnv(const char* value) { setenv("LPP_LAB_THREADS", value, 1); }
    ~ThreadsEnv() { unsetenv("LPP_LAB_THREADS"); }
};

std::string fingerprint(const ExperimentResult& r) { return cli::report_json(r.report, false) + r.data.str(); }

}  // namespace

TEST_CASE("check rules") {
    CHECK(Check{"a", 1.01, 1.0, 0.02, CheckRule::within_abs}.pass());
    CHECK_FALSE(Check{"a", 1.03, 1.0, 0.02, CheckRule::within_abs}.pass());
    CHECK(Check{"a", 2.03, 2.0, 0.02, CheckRule::within_rel}.pass());
    CHECK_FALSE(Check{"a", 2.05, 2.0, 0.02, CheckRule::within_rel}.pass());
    CHECK(Check{"a", 0.01, 0.0, 0.02, CheckRule::at_most}.pass());
    CHECK_FALSE(Check{"a", 0.03, 0.0, 0.02, CheckRule::at_most}.pass());
    CHECK(Check{"a", 0.9, 0.0, 0.8, CheckRule::at_least}.pass());
    CHECK_FALSE(Check{"a", 0.7, 0.0, 0.8, CheckRule::at_least}.pass());
    CHECK(Check{"a", 1e9, 0.0, 0.0, CheckRule::info}.pass());
    CHECK_FALSE(Check{"a", std::nan(""), 0.0, 1.0, CheckRule::at_most}.pass());
    CHECK(std::string(rule_name(CheckRule::within_rel)) == "within_rel");

    ExperimentReport rep;
    rep.add("x", 1.0, 0.0, 2.0, CheckRule::at_most);
    CHECK(rep.pass());
    rep.add("y", 3.0, 0.0, 2.0, CheckRule::at_most);
    CHECK_FALSE(rep.pass());
    REQUIRE(rep.find("y") != nullptr);
    CHECK(rep.find("y")->estimate == 3.0);
    CHECK(rep.find("z") == nullptr);
}

TEST_CASE("CSV quoting and number formatting") {
    CsvTable t{{"a", "b,c"}, {}};
    t.add_row({"x\"y", "plain"});
    t.add_row({"line\nbreak", "2"});
    CHECK(t.str() == "a,\"b,c\"\r\n\"x\"\"y\",plain\r\n\"line\nbreak\",2\r\n");
    CHECK_THROWS(t.add_row({"only one"}));
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(std::int64_t(-7)) == "-7");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("tolerances") {
    Tolerances tol;
    CHECK(tol.get("shape_rel") == 0.02);
    tol.set("shape_rel", 0.5);
    CHECK(tol.get("shape_rel") == 0.5);
    CHECK_THROWS(tol.get("nope"));
    CHECK_THROWS(tol.set("nope", 1.0));
    CHECK_THROWS(tol.set("shape_rel", -1.0));
}

TEST_CASE("small experiment runs produce consistent reports") {
    const ModelParams p(0.5, 0.0);
    SUBCASE("shape") {
        const auto r = run_shape(p, 0.0, 200, 4, 1);
        CHECK(r.report.name == "shape");
        CHECK(r.data.rows.size() == 4);
        CHECK(r.report.find("mean_g_over_n")->target == doctest::Approx(2.0));
        CHECK(r.report.seed == 1);
    }
    SUBCASE("invariance with zero steps is the sampler against its oracle") {
        const auto r = run_invariance(ModelParams(0.5, 0.5), 1.2, 0, 20000, 2);
        CHECK(r.report.find("chi2_p_before_after") == nullptr);
        CHECK(r.report.find("tv_before_after")->estimate == 0.0);
        CHECK(r.report.find("tv_before_oracle")->estimate < 0.03);
    }
    SUBCASE("recentered at n = 1 only reports") {
        const auto r = run_recentered(ModelParams(0.5, 0.5), 1, 2000, 2, 3);
        for (const auto& c : r.report.checks) CHECK(c.rule == CheckRule::info);
        CHECK(r.report.pass());
    }
    SUBCASE("slope with zero rows keeps the initial slope") {
        const auto r = run_slope_conservation(ModelParams(0.5, 0.5), 2.0, 0, 400, 4);
        CHECK(r.report.name == "slope");
        CHECK(r.data.rows.size() == 401);
        CHECK(r.report.find("slope")->estimate == doctest::Approx(2.0));
        CHECK(r.report.pass());
    }
    SUBCASE("gibbs rejects c >= 1") { CHECK_THROWS_AS(run_gibbs_validation(0.5, 1.2, 1), std::domain_error); }
    SUBCASE("pinning and direction") {
        const auto pin = run_pinning(p, 100, 3, 5);
        CHECK(pin.data.rows.size() == 3);
        CHECK(pin.report.find("mean_fraction") != nullptr);
        const auto dir = run_direction(p, 0.5, 100, 3, 6);
        CHECK(dir.data.rows.size() == 3);
    }
    SUBCASE("sampler equivalence") {
        const auto r = run_sampler_equivalence(ModelParams(0.5, 0.5), 1.2, 2, 50000, 7);
        CHECK(r.report.find("tv_joint_direct")->estimate < 0.02);
    }
}

TEST_CASE("results do not depend on the worker count") {
    const ModelParams p(0.5, 0.5);
    const auto run_all = [&] {
        std::string s;
        s += fingerprint(run_shape(p, 0.3, 150, 9, 11));
        s += fingerprint(run_invariance(p, 1.2, 3, 20000, 12));
        s += fingerprint(run_recentered(p, 20, 3000, 2, 13));
        s += fingerprint(run_sampler_equivalence(p, 1.2, 2, 30000, 14));
        GibbsValidationSizes small;
        small.finite_chain_samples = 9000;
        small.limit_chain_samples = 9000;
        small.h_limit_m = 400;
        small.c_limit_m = 400;
        s += fingerprint(run_gibbs_validation(0.5, 0.5, 15, {}, small));
        return s;
    };
    std::string one, four;
    {
        ThreadsEnv env("1");
        CHECK(worker_count() == 1);
        one = run_all();
    }
    {
        ThreadsEnv env("4");
        CHECK(worker_count() == 4);
        four = run_all();
    }
    CHECK(one == four);
    {
        ThreadsEnv env("4");
        CHECK(run_all() == four);
    }
}

TEST_CASE("parallel_for covers every index once and propagates the first error") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
    CHECK_THROWS_WITH(parallel_for(
                          100,
                          [](std::size_t i) {
                              if (i == 7 || i == 50) throw std::runtime_error("bad " + std::to_string(i));
                          },
                          4),
                      "bad 7");
}
