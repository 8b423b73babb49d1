#include "lpplab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lpplab/busemann.hpp"
#include "lpplab/gibbs.hpp"
#include "lpplab/lpp.hpp"
#include "lpplab/measures.hpp"
#include "lpplab/parallel.hpp"
#include "lpplab/stats.hpp"

namespace lpplab {

const char* rule_name(CheckRule rule) {
    switch (rule) {
        case CheckRule::within_abs: return "within_abs";
        case CheckRule::within_rel: return "within_rel";
        case CheckRule::at_most: return "at_most";
        case CheckRule::at_least: return "at_least";
        case CheckRule::info: return "info";
    }
    return "info";
}

bool Check::pass() const {
    if (std::isnan(estimate)) return rule == CheckRule::info;
    switch (rule) {
        case CheckRule::within_abs: return std::abs(estimate - target) <= tolerance;
        case CheckRule::within_rel: return std::abs(estimate - target) <= tolerance * std::abs(target);
        case CheckRule::at_most: return estimate <= tolerance;
        case CheckRule::at_least: return estimate >= tolerance;
        case CheckRule::info: return true;
    }
    return false;
}

bool ExperimentReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

const Check* ExperimentReport::find(const std::string& check_name) const {
    for (const auto& c : checks)
        if (c.name == check_name) return &c;
    return nullptr;
}

void ExperimentReport::add(std::string check_name, double estimate, double target, double tolerance,
                           CheckRule rule) {
    checks.push_back({std::move(check_name), estimate, target, tolerance, rule});
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::invalid_argument("CSV row width does not match header");
    rows.push_back(std::move(row));
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

std::string CsvTable::str() const {
    std::string out;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_number(std::int64_t v) { return std::to_string(v); }

Tolerances::Tolerances()
    : values_{{"shape_rel", 0.02},
              {"invariance_tv", 0.03},
              {"invariance_coexistence_tv", 0.02},
              {"chi2_alpha", 1e-3},
              {"recentered_tv", 0.03},
              {"recentered_coexistence_tv", 0.02},
              {"onef1s_tv", 0.05},
              {"busemann_se", 3.0},
              {"pinning_strong", 0.8},
              {"pinning_weak", 0.05},
              {"direction_abs", 0.05},
              {"slope_abs", 0.05},
              {"gibbs_quadrature_abs", 1e-10},
              {"gibbs_delta_abs", 1e-12},
              {"gibbs_tv", 0.02},
              {"chain_exact_tv", 1e-8},
              {"chain_tv", 0.01},
              {"h_limit_rel", 0.05},
              {"c_of_h_abs", 1e-6},
              {"row_sum_abs", 1e-10},
              {"sampler_tv", 0.01}} {}

double Tolerances::get(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw std::out_of_range("unknown tolerance: " + name);
    return it->second;
}

void Tolerances::set(const std::string& name, double value) {
    if (!values_.contains(name)) throw std::out_of_range("unknown tolerance: " + name);
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("tolerance must be finite and nonnegative: " + name);
    values_[name] = value;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-replica streams: one for the environment, one for auxiliary draws.
std::uint64_t field_seed(std::uint64_t master, std::size_t index) {
    return derive_seed(derive_seed(master, index), 0);
}

RandomStream replica_stream(std::uint64_t master, std::size_t index) {
    return RandomStream(derive_seed(derive_seed(master, index), 1));
}

void require_positive(Coord v, const char* what) {
    if (v < 1) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_count(std::size_t v, const char* what) {
    if (v == 0) throw std::invalid_argument(std::string(what) + " must be positive");
}

std::vector<std::pair<std::string, double>> model_params(const ModelParams& p) {
    return {{"q", p.q()}, {"c", p.c()}};
}

// Samples are accumulated in fixed-size blocks; each block fills its own accumulator and
// blocks are merged in index order, so results do not depend on the worker count.
template <class Acc, class PerSample>
std::vector<Acc> blocked(std::size_t count, std::size_t block, PerSample&& per_sample) {
    const std::size_t blocks = (count + block - 1) / block;
    std::vector<Acc> acc(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t hi = std::min(count, (b + 1) * block);
        for (std::size_t i = b * block; i < hi; ++i) per_sample(acc[b], i);
    });
    return acc;
}

PmfKey to_key(const std::vector<double>& v) {
    PmfKey k(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) k[i] = static_cast<std::int64_t>(std::llround(v[i]));
    return k;
}

double exact_mean(const ExactPmf& pmf, std::size_t coord) {
    double m = 0.0;
    for (const auto& [k, p] : pmf) m += p * static_cast<double>(k[coord]);
    return m;
}

}  // namespace

ExperimentResult run_shape(const ModelParams& params, double xi, Coord n, std::size_t reps,
                           std::uint64_t seed, const Tolerances& tol) {
    const auto t0 = Clock::now();
    if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("xi must lie in [0,1]");
    require_positive(n, "n");
    require_count(reps, "reps");
    const LatticeSite from{-n + static_cast<Coord>(std::floor(xi * static_cast<double>(n))), -n};
    std::vector<Weight> values(reps);
    parallel_for(reps, [&](std::size_t r) {
        const WeightField field(params, field_seed(seed, r));
        values[r] = passage_time(field, from, {0, 0});
    });

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "shape";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"xi", xi}, {"n", double(n)}, {"reps", double(reps)}});
    rep.seed = seed;
    std::vector<double> scaled(reps);
    for (std::size_t r = 0; r < reps; ++r) scaled[r] = static_cast<double>(values[r]) / double(n);
    const MeanCI ci = mean_ci(scaled);
    rep.add("mean_g_over_n", ci.mean, shape_rho(params, 1.0 - xi), tol.get("shape_rel"),
            CheckRule::within_rel);
    rep.add("std_error", ci.std_error, 0.0, 0.0, CheckRule::info);

    out.data.header = {"replica", "seed", "n", "value", "value_over_n"};
    for (std::size_t r = 0; r < reps; ++r)
        out.data.add_row({format_number(r), format_number(field_seed(seed, r)), format_number(n),
                          format_number(values[r]), format_number(scaled[r])});
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_invariance(const ModelParams& params, double s, Coord steps, std::size_t samples,
                                std::uint64_t seed, const Tolerances& tol, int K) {
    const auto t0 = Clock::now();
    if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
    if (K < 1 || K > 3) throw std::invalid_argument("K must lie in [1,3]");
    require_count(samples, "N");
    const ExactPmf oracle = pmf_mu_prefix(params, s, K);

    const std::size_t uK = static_cast<std::size_t>(K);
    std::vector<std::int64_t> before(samples * uK), after(samples * uK);
    parallel_for(samples, [&](std::size_t r) {
        RandomStream rng = replica_stream(seed, r);
        const MeasureSample f = sample_mu(params, s, static_cast<int>(steps) + K, rng);
        const WeightField field(params, field_seed(seed, r));
        std::vector<double> state(f.values.size() + 1, 0.0);
        for (std::size_t k = 0; k < f.values.size(); ++k) state[k + 1] = double(f.values[k]);
        for (Coord row = 1; row <= steps; ++row) state = evolve_step(field, state, row);
        const auto inc = recenter(state);
        for (std::size_t k = 0; k < uK; ++k) {
            before[r * uK + k] = f.values[k];
            after[r * uK + k] = std::llround(inc[k]);
        }
    });

    EmpiricalPmf pb, pa;
    for (std::size_t r = 0; r < samples; ++r) {
        pb.add(PmfKey(before.begin() + long(r * uK), before.begin() + long((r + 1) * uK)));
        pa.add(PmfKey(after.begin() + long(r * uK), after.begin() + long((r + 1) * uK)));
    }

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "invariance";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(),
                      {{"s", s}, {"steps", double(steps)}, {"N", double(samples)}, {"K", double(K)}});
    rep.seed = seed;
    const bool coexist = on_coexistence_line(params, s);
    const double tv_tol = (coexist || steps == 0) ? tol.get("invariance_coexistence_tv")
                                                  : tol.get("invariance_tv");
    const double alpha = tol.get("chi2_alpha");
    rep.add("tv_before_after", max_marginal_tv(pb, pa), 0.0, tv_tol, CheckRule::at_most);
    rep.add("tv_after_oracle", max_marginal_tv(pa, oracle), 0.0, tv_tol, CheckRule::at_most);
    rep.add("tv_before_oracle", max_marginal_tv(pb, oracle), 0.0, tv_tol, CheckRule::at_most);
    if (steps > 0) {
        const Chi2Result two = chi2_two_sample(pb, pa);
        rep.add("chi2_p_before_after", two.p_value, 0.0, alpha, CheckRule::at_least);
    }
    const Chi2Result gof = chi2_goodness_of_fit(pa, oracle);
    rep.add("chi2_p_after_oracle", gof.p_value, 0.0, alpha, CheckRule::at_least);

    out.data.header = {"sample_index", "k", "before", "after"};
    for (std::size_t r = 0; r < samples; ++r)
        for (std::size_t k = 0; k < uK; ++k)
            out.data.add_row({format_number(r), format_number(k + 1), format_number(before[r * uK + k]),
                              format_number(after[r * uK + k])});
    rep.runtime_s = seconds_since(t0);
    return out;
}

namespace {

// Shared reduction for experiments that compare a K-prefix sample with an exact prefix law.
void prefix_law_checks(ExperimentReport& rep, const EmpiricalPmf& emp, const ExactPmf& oracle,
                       double tv_tol, bool claim) {
    rep.add("tv_oracle", max_marginal_tv(emp, oracle), 0.0, tv_tol,
            claim ? CheckRule::at_most : CheckRule::info);
    rep.add("chi2_p_oracle", chi2_goodness_of_fit(emp, oracle).p_value, 0.0, 0.0, CheckRule::info);
    for (std::size_t k = 0; k < emp.dimension(); ++k) {
        double m = 0.0;
        for (const auto& [key, cnt] : emp.counts()) m += double(key[k]) * double(cnt);
        m /= double(emp.total());
        rep.add("mean_f" + std::to_string(k + 1), m, exact_mean(oracle, k), 0.0, CheckRule::info);
    }
}

CsvTable prefix_table(const std::vector<PmfKey>& rows) {
    CsvTable t;
    t.header = {"sample_index", "k", "value"};
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < rows[r].size(); ++k)
            t.add_row({format_number(r), format_number(k + 1), format_number(rows[r][k])});
    return t;
}

}  // namespace

ExperimentResult run_recentered(const ModelParams& params, Coord n, std::size_t samples, int K,
                                std::uint64_t seed, const Tolerances& tol) {
    const auto t0 = Clock::now();
    require_positive(n, "n");
    require_count(samples, "N");
    if (K < 1 || K > 3) throw std::invalid_argument("K must lie in [1,3]");
    const ExactPmf oracle = pmf_mu_prefix(params, params.r_c(), K);

    std::vector<PmfKey> rows(samples);
    parallel_for(samples, [&](std::size_t r) {
        const WeightField field(params, field_seed(seed, r));
        const PassageRow row = point_source_row(field, {1, 1}, n, n + K);
        PmfKey key(static_cast<std::size_t>(K));
        for (int k = 1; k <= K; ++k) key[std::size_t(k - 1)] = row.at(n + k) - row.at(n);
        rows[r] = std::move(key);
    });
    EmpiricalPmf emp;
    for (const auto& k : rows) emp.add(k);

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "recentered";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"n", double(n)}, {"N", double(samples)}, {"K", double(K)}});
    rep.seed = seed;
    const double tv_tol =
        params.c() > 1.0 ? tol.get("recentered_coexistence_tv") : tol.get("recentered_tv");
    // Shallow depths are pre-asymptotic: reported without a pass claim.
    prefix_law_checks(rep, emp, oracle, tv_tol, n >= 100);
    out.data = prefix_table(rows);
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_1f1s(const ModelParams& params, double theta, Coord n, std::size_t samples, int K,
                          std::uint64_t seed, const Tolerances& tol) {
    const auto t0 = Clock::now();
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be >= 0");
    require_positive(n, "n");
    require_count(samples, "N");
    if (K < 1 || K > 3) throw std::invalid_argument("K must lie in [1,3]");

    const double qr = params.q() * params.r_c();
    const bool generic = theta > qr / (1.0 - qr);
    const double s = generic ? slope_T_inverse(params, theta) : params.r_c();
    const ExactPmf oracle = pmf_mu_prefix(params, s, K);

    Profile f{-n, {}};
    for (Coord i = -n; i <= K; ++i)
        f.values.push_back(std::floor(theta * static_cast<double>(i + n + 1)));

    std::vector<PmfKey> rows(samples);
    parallel_for(samples, [&](std::size_t r) {
        const WeightField field(params, field_seed(seed, r));
        std::vector<double> g = passage_profile(field, f, 0, K);
        rows[r] = to_key(recenter(g));
    });
    EmpiricalPmf emp;
    for (const auto& k : rows) emp.add(k);

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "onef1s";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"theta", theta},
                                         {"n", double(n)},
                                         {"N", double(samples)},
                                         {"K", double(K)},
                                         {"target_s", s}});
    rep.seed = seed;
    if (generic)
        rep.add("slope_round_trip", slope_T(params, s), theta, 1e-9, CheckRule::within_abs);
    prefix_law_checks(rep, emp, oracle, tol.get("onef1s_tv"), true);
    out.data = prefix_table(rows);
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_slope_conservation(const ModelParams& params, double theta, Coord rows, Coord window,
                                        std::uint64_t seed, const Tolerances& tol) {
    const auto t0 = Clock::now();
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be >= 0");
    if (rows < 0) throw std::invalid_argument("rows must be nonnegative");
    if (window < rows + 4) throw std::invalid_argument("window must exceed rows by at least 4");

    std::vector<double> state(static_cast<std::size_t>(window) + 1, 0.0);
    for (Coord i = 1; i <= window; ++i) state[std::size_t(i)] = std::floor(theta * double(i));
    const WeightField field(params, field_seed(seed, 0));
    for (Coord r = 1; r <= rows; ++r) state = evolve_step(field, state, r);

    // Least squares over the right half of the surviving columns.
    const std::size_t L = state.size() - 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
    for (std::size_t k = L / 2; k <= L; ++k) {
        const double x = double(k), y = state[k];
        sx += x, sy += y, sxx += x * x, sxy += x * y, cnt += 1;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "slope";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"theta", theta}, {"rows", double(rows)}, {"window", double(window)}});
    rep.seed = seed;
    const double bulk = params.bulk_alpha() / (1.0 - params.bulk_alpha());
    const double t = tol.get("slope_abs");
    if (theta > bulk) rep.add("slope", slope, theta, t, CheckRule::within_abs);
    else rep.add("slope", slope, std::max(theta, bulk), std::max(theta, bulk) + t, CheckRule::at_most);

    out.data.header = {"k", "value"};
    for (std::size_t k = 0; k <= L; ++k)
        out.data.add_row({format_number(Coord(k) + rows), format_number(state[k])});
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_gibbs_validation(double q, double c, std::uint64_t seed, const Tolerances& tol,
                                      const GibbsValidationSizes& sizes) {
    const auto t0 = Clock::now();
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie in (0,1)");
    if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("the Gibbs chains require c in [0,1)");
    const ModelParams params(q, c);

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "gibbs";
    rep.params = {{"q", q},
                  {"c", c},
                  {"finite_chain_samples", double(sizes.finite_chain_samples)},
                  {"limit_chain_samples", double(sizes.limit_chain_samples)},
                  {"h_limit_m", double(sizes.h_limit_m)},
                  {"c_limit_m", double(sizes.c_limit_m)}};
    rep.seed = seed;
    const double alpha = tol.get("chi2_alpha");

    // u: quadrature against direct summation, and the n = 0 delta.
    double u_err = 0.0, delta_err = 0.0;
    for (double qq : {0.3, 0.5, 0.7})
        for (int n = 0; n <= 4; ++n)
            for (std::int64_t k = 0; k <= 6; ++k)
                for (std::int64_t l = 0; l <= 6; ++l) {
                    const double quad = u_quadrature(n, k, l, qq);
                    u_err = std::max(u_err, std::abs(quad - u_exact(n, k, l, qq)));
                    if (n == 0) delta_err = std::max(delta_err, std::abs(quad - (k == l ? 1.0 : 0.0)));
                }
    rep.add("u_quadrature_max_error", u_err, 0.0, tol.get("gibbs_quadrature_abs"), CheckRule::at_most);
    rep.add("u0_delta_max_error", delta_err, 0.0, tol.get("gibbs_delta_abs"), CheckRule::at_most);

    // Finite chain against the interlacing Gibbs law with m = 4, y = (3, 0).
    constexpr int m = 4;
    constexpr std::int64_t gap = 3;
    const FiniteChain chain(m, gap, q, c);
    const GibbsLaw law = gibbs_enumerate(m, gap, 0, q, c, 40);
    const auto chain_exact = chain.exact_marginals();
    const auto law_exact = law.recentered_marginals();
    double exact_tv = 0.0;
    for (int t = 0; t <= m; ++t)
        exact_tv = std::max(exact_tv, tv_distance(chain_exact[std::size_t(t)], law_exact[std::size_t(t)]));
    rep.add("chain_law_exact_tv", exact_tv, 0.0, tol.get("chain_exact_tv"), CheckRule::at_most);
    rep.add("chain_row_error", chain.max_row_error(), 0.0, tol.get("row_sum_abs"), CheckRule::at_most);

    struct FiniteAcc {
        std::vector<EmpiricalPmf> times = std::vector<EmpiricalPmf>(m + 1);
        EmpiricalPmf paths;
        std::uint64_t endpoint_violations = 0, interlace_violations = 0;
    };
    const auto finite_parts = blocked<FiniteAcc>(sizes.finite_chain_samples, 4096, [&](FiniteAcc& a, std::size_t i) {
        RandomStream rng(derive_seed(derive_seed(seed, 1), i));
        const auto lam = chain.sample(rng);
        if (lam.back().gap() != gap) ++a.endpoint_violations;
        PmfKey key;
        for (int t = 0; t <= m; ++t) {
            const auto& l = lam[std::size_t(t)];
            a.times[std::size_t(t)].add(PmfKey{l.lambda1, l.lambda2});
            key.push_back(l.lambda1);
            key.push_back(l.lambda2);
            if (t > 0 && !interlaces(lam[std::size_t(t - 1)], l)) ++a.interlace_violations;
        }
        a.paths.add(key);
    });
    std::vector<EmpiricalPmf> times(m + 1);
    EmpiricalPmf paths;
    std::uint64_t endpoint_bad = 0, interlace_bad = 0;
    for (const auto& p : finite_parts) {
        for (int t = 0; t <= m; ++t) times[std::size_t(t)].merge(p.times[std::size_t(t)]);
        paths.merge(p.paths);
        endpoint_bad += p.endpoint_violations;
        interlace_bad += p.interlace_violations;
    }
    double chain_tv = 0.0;
    for (int t = 0; t <= m; ++t)
        chain_tv = std::max(chain_tv, tv_distance(times[std::size_t(t)], law_exact[std::size_t(t)]));
    rep.add("finite_chain_tv", chain_tv, 0.0, tol.get("gibbs_tv"), CheckRule::at_most);
    const auto path_prob = [&](const PmfKey& key) {
        // Recentred chain to Gibbs path with B2(m) = 0.
        const std::int64_t shift = -key[2 * m + 1];
        TwoLayerPath p;
        for (int t = 0; t <= m; ++t) {
            p.upper.push_back(key[std::size_t(2 * t)] + shift);
            p.lower.push_back(key[std::size_t(2 * t + 1)] + shift);
        }
        return law.probability(p);
    };
    rep.add("finite_chain_chi2_p", chi2_goodness_of_fit(paths, path_prob).p_value, 0.0, alpha,
            CheckRule::at_least);
    rep.add("endpoint_violations", double(endpoint_bad), 0.0, 0.0, CheckRule::at_most);
    rep.add("interlacing_violations", double(interlace_bad), 0.0, 0.0, CheckRule::at_most);

    // Limit chain, auxiliary queueing chain, and the invariant measure at s = 1.
    constexpr int len = 5;
    constexpr int shown = 2;
    struct LimitAcc {
        std::vector<EmpiricalPmf> lim = std::vector<EmpiricalPmf>(shown + 1);
        std::vector<EmpiricalPmf> aux = std::vector<EmpiricalPmf>(shown + 1);
        EmpiricalPmf lim_joint, aux_joint, lim_top, aux_top, mu_top;
        std::uint64_t identity_violations = 0;
    };
    const auto limit_parts = blocked<LimitAcc>(sizes.limit_chain_samples, 8192, [&](LimitAcc& a, std::size_t i) {
        const std::uint64_t base = derive_seed(derive_seed(seed, 2), i);
        RandomStream r1(derive_seed(base, 0)), r2(derive_seed(base, 1)), r3(derive_seed(base, 2));
        const auto lim = limit_chain_sample(len, q, c, r1);
        const AuxChain aux = aux_chain_sample(len, q, c, r2);
        if (!aux_identity_holds(aux)) ++a.identity_violations;
        PmfKey jl, ja, tl, ta;
        for (int t = 0; t <= len; ++t) {
            const auto& x = lim[std::size_t(t)];
            const auto& y = aux.lambda[std::size_t(t)];
            if (t <= shown) {
                a.lim[std::size_t(t)].add(PmfKey{x.lambda1, x.lambda2});
                a.aux[std::size_t(t)].add(PmfKey{y.lambda1, y.lambda2});
                jl.insert(jl.end(), {x.lambda1, x.lambda2});
                ja.insert(ja.end(), {y.lambda1, y.lambda2});
            }
            if (t > 0) {
                tl.push_back(x.lambda1 - lim[0].lambda1);
                ta.push_back(y.lambda1 - aux.lambda[0].lambda1);
            }
        }
        a.lim_joint.add(jl);
        a.aux_joint.add(ja);
        a.lim_top.add(tl);
        a.aux_top.add(ta);
        a.mu_top.add(sample_mu(params, 1.0, len, r3).values);
    });
    LimitAcc all;
    for (const auto& p : limit_parts) {
        for (int t = 0; t <= shown; ++t) {
            all.lim[std::size_t(t)].merge(p.lim[std::size_t(t)]);
            all.aux[std::size_t(t)].merge(p.aux[std::size_t(t)]);
        }
        all.lim_joint.merge(p.lim_joint);
        all.aux_joint.merge(p.aux_joint);
        all.lim_top.merge(p.lim_top);
        all.aux_top.merge(p.aux_top);
        all.mu_top.merge(p.mu_top);
        all.identity_violations += p.identity_violations;
    }
    double lim_aux_tv = 0.0;
    for (int t = 0; t <= shown; ++t)
        lim_aux_tv = std::max(lim_aux_tv, tv_distance(all.lim[std::size_t(t)], all.aux[std::size_t(t)]));
    rep.add("limit_aux_tv", lim_aux_tv, 0.0, tol.get("chain_tv"), CheckRule::at_most);
    rep.add("limit_aux_chi2_p", chi2_two_sample(all.lim_joint, all.aux_joint).p_value, 0.0, alpha,
            CheckRule::at_least);
    rep.add("limit_top_vs_mu_tv", max_marginal_tv(all.lim_top, all.mu_top), 0.0, tol.get("chain_tv"),
            CheckRule::at_most);
    rep.add("aux_top_vs_mu_tv", max_marginal_tv(all.aux_top, all.mu_top), 0.0, tol.get("chain_tv"),
            CheckRule::at_most);
    rep.add("aux_identity_violations", double(all.identity_violations), 0.0, 0.0, CheckRule::at_most);
    double p0_mass = 0.0;
    for (int d = 0; d < 20000; ++d) p0_mass += (d + 1) * std::pow(c, d);
    p0_mass *= (1.0 - c) * (1.0 - c);
    rep.add("limit_initial_mass", p0_mass, 1.0, 1e-12, CheckRule::within_abs);

    // Large-m asymptotics of h and u.
    {
        const std::int64_t mm = sizes.h_limit_m;
        const auto k = static_cast<std::int64_t>(std::floor(std::sqrt(double(mm))));
        for (int l = 0; l <= 2; ++l)
            rep.add("h_limit_l" + std::to_string(l), h_val(0, int(mm), k, l, q, c),
                    (l + 1) * (1.0 - c) * (1.0 - c), tol.get("h_limit_rel"), CheckRule::within_rel);
    }
    double c_err = 0.0;
    for (double h : {0.25, 1.0, 2.0, 4.0}) c_err = std::max(c_err, std::abs(c_of_h(h, q) - c_of_h_quadrature(h, q)));
    rep.add("c_of_h_quadrature_error", c_err, 0.0, tol.get("c_of_h_abs"), CheckRule::at_most);
    {
        const std::int64_t mm = sizes.c_limit_m;
        const auto k = static_cast<std::int64_t>(std::floor(std::sqrt(double(mm))));
        rep.add("c_of_h_limit", double(mm) * u_quadrature(int(mm), k, 0, q), c_of_h(1.0, q),
                tol.get("h_limit_rel"), CheckRule::within_rel);
    }

    out.data.header = {"check", "estimate", "target", "tolerance", "rule", "pass"};
    for (const auto& ch : rep.checks)
        out.data.add_row({ch.name, format_number(ch.estimate), format_number(ch.target),
                          format_number(ch.tolerance), rule_name(ch.rule), ch.pass() ? "true" : "false"});
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_pinning(const ModelParams& params, Coord n, std::size_t reps, std::uint64_t seed,
                             const Tolerances& tol) {
    const auto t0 = Clock::now();
    require_positive(n, "n");
    require_count(reps, "reps");
    std::vector<double> fraction(reps), leftmost(reps);
    parallel_for(reps, [&](std::size_t r) {
        const WeightField field(params, field_seed(seed, r));
        fraction[r] = pinning_fraction(field, n);
        leftmost[r] = pinning_fraction(field, n, TieBreak::leftmost);
    });

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "pinning";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"n", double(n)}, {"reps", double(reps)}});
    rep.seed = seed;
    const double mean = mean_ci(fraction).mean;
    if (params.c() > 1.0)
        rep.add("mean_fraction", mean, 1.0, tol.get("pinning_strong"), CheckRule::at_least);
    else
        rep.add("mean_fraction", mean, 0.0, tol.get("pinning_weak"), CheckRule::at_most);
    rep.add("mean_fraction_leftmost", mean_ci(leftmost).mean, 0.0, 0.0, CheckRule::info);

    out.data.header = {"replica", "seed", "n", "fraction", "fraction_leftmost"};
    for (std::size_t r = 0; r < reps; ++r)
        out.data.add_row({format_number(r), format_number(field_seed(seed, r)), format_number(n),
                          format_number(fraction[r]), format_number(leftmost[r])});
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_direction(const ModelParams& params, double xi, Coord n, std::size_t reps,
                               std::uint64_t seed, const Tolerances& tol) {
    const auto t0 = Clock::now();
    if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0,1)");
    if (n < 10) throw std::invalid_argument("n must be at least 10");
    require_count(reps, "reps");
    const bool gap = params.c() > 1.0 && xi > params.xi_max();
    const Coord lo = -(6 * n) / 10, hi = -(4 * n) / 10;

    std::vector<double> slope(reps);
    parallel_for(reps, [&](std::size_t r) {
        const WeightField field(params, field_seed(seed, r));
        if (gap) slope[r] = local_slope(busemann_geodesic(field, xi, n), lo, hi);
        else slope[r] = direction_estimate(field, xi, n);
    });

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "direction";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"xi", xi}, {"n", double(n)}, {"reps", double(reps)}});
    rep.seed = seed;
    const MeanCI ci = mean_ci(slope);
    const double t = tol.get("direction_abs");
    if (gap) {
        // Directions strictly inside (xi_max, 1) are not attained; measure how far the mean
        // mid-depth slope sits inside that interval.
        rep.add("mean_local_slope", ci.mean, params.xi_max(), 0.0, CheckRule::info);
        rep.add("gap_penetration", std::min(ci.mean - params.xi_max(), 1.0 - ci.mean), 0.0, t,
                CheckRule::at_most);
    } else {
        rep.add("mean_direction", ci.mean, xi, t, CheckRule::within_abs);
    }
    rep.add("std_error", ci.std_error, 0.0, 0.0, CheckRule::info);

    out.data.header = {"replica", "seed", "n", "slope"};
    for (std::size_t r = 0; r < reps; ++r)
        out.data.add_row({format_number(r), format_number(field_seed(seed, r)), format_number(n),
                          format_number(slope[r])});
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_busemann(const ModelParams& params, double xi, Coord n, std::size_t reps,
                              std::uint64_t seed, const Tolerances& tol, std::size_t stability_reps) {
    const auto t0 = Clock::now();
    require_positive(n, "n");
    if (reps < 2) throw std::invalid_argument("reps must be at least 2");
    const double s = busemann_parameter(params, xi);
    const ExactPmf oracle = pmf_mu_prefix(params, s, 1);
    stability_reps = std::min(stability_reps, reps);
    const Coord deeper = n + n / 4;

    std::vector<Weight> w1(reps);
    std::vector<int> agree(stability_reps, 0);
    parallel_for(reps, [&](std::size_t r) {
        const WeightField field(params, field_seed(seed, r));
        w1[r] = busemann_slice(field, xi, n, 0, 1).increments[0];
        if (r < stability_reps) agree[r] = busemann_slice(field, xi, deeper, 0, 1).increments[0] == w1[r];
    });

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "busemann";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"xi", xi}, {"n", double(n)}, {"reps", double(reps)}, {"s", s}});
    rep.seed = seed;
    std::vector<double> v(w1.begin(), w1.end());
    const MeanCI ci = mean_ci(v);
    rep.add("mean_w1", ci.mean, exact_mean(oracle, 0), tol.get("busemann_se") * ci.std_error,
            CheckRule::within_abs);
    if (stability_reps > 0)
        rep.add("depth_agreement", double(std::accumulate(agree.begin(), agree.end(), 0)) / double(stability_reps),
                1.0, 0.0, CheckRule::info);

    out.data.header = {"replica", "seed", "n", "w1"};
    for (std::size_t r = 0; r < reps; ++r)
        out.data.add_row({format_number(r), format_number(field_seed(seed, r)), format_number(n),
                          format_number(w1[r])});
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_xi_monotonicity(const ModelParams& params, double xi_low, double xi_high, Coord n,
                                     Coord K, std::size_t reps, std::uint64_t seed) {
    const auto t0 = Clock::now();
    require_count(reps, "reps");
    std::vector<MonotonicityReport> results(reps);
    parallel_for(reps, [&](std::size_t r) {
        results[r] = xi_monotonicity_check(WeightField(params, field_seed(seed, r)), xi_low, xi_high, n, 0, K);
    });

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "xi_monotonicity";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"xi_low", xi_low},
                                         {"xi_high", xi_high},
                                         {"n", double(n)},
                                         {"K", double(K)},
                                         {"reps", double(reps)}});
    rep.seed = seed;
    std::size_t violations = 0, checks = 0;
    out.data.header = {"replica", "seed", "checks", "violations"};
    for (std::size_t r = 0; r < reps; ++r) {
        const auto& m = results[r];
        const std::size_t c = m.horizontal_checks + m.vertical_checks + m.recursion_checks;
        violations += m.violations.size();
        checks += c;
        out.data.add_row({format_number(r), format_number(field_seed(seed, r)), format_number(c),
                          format_number(m.violations.size())});
    }
    rep.add("violations", double(violations), 0.0, 0.0, CheckRule::at_most);
    rep.add("checks", double(checks), 0.0, 0.0, CheckRule::info);
    rep.runtime_s = seconds_since(t0);
    return out;
}

ExperimentResult run_sampler_equivalence(const ModelParams& params, double s, int K, std::size_t samples,
                                         std::uint64_t seed, const Tolerances& tol) {
    const auto t0 = Clock::now();
    require_count(samples, "N");
    if (K < 1 || K > 3) throw std::invalid_argument("K must lie in [1,3]");
    struct Acc {
        EmpiricalPmf direct, joint;
    };
    const auto parts = blocked<Acc>(samples, 8192, [&](Acc& a, std::size_t i) {
        const std::uint64_t base = derive_seed(seed, i);
        RandomStream r1(derive_seed(base, 0)), r2(derive_seed(base, 1));
        a.direct.add(sample_mu(params, s, K, r1).values);
        a.joint.add(sample_joint(params, {s}, K, r2).rows[0]);
    });
    EmpiricalPmf direct, joint;
    for (const auto& p : parts) {
        direct.merge(p.direct);
        joint.merge(p.joint);
    }
    const ExactPmf oracle = pmf_mu_prefix(params, s, K);

    ExperimentResult out;
    auto& rep = out.report;
    rep.name = "sampler_equivalence";
    rep.params = model_params(params);
    rep.params.insert(rep.params.end(), {{"s", s}, {"K", double(K)}, {"N", double(samples)}});
    rep.seed = seed;
    rep.add("tv_joint_direct", max_marginal_tv(joint, direct), 0.0, tol.get("sampler_tv"), CheckRule::at_most);
    rep.add("chi2_p_joint_direct", chi2_two_sample(joint, direct).p_value, 0.0, tol.get("chi2_alpha"),
            CheckRule::at_least);
    rep.add("tv_joint_oracle", max_marginal_tv(joint, oracle), 0.0, 0.0, CheckRule::info);
    rep.add("chi2_p_joint_oracle", chi2_goodness_of_fit(joint, oracle).p_value, 0.0, 0.0, CheckRule::info);

    out.data.header = {"k", "value", "direct", "joint"};
    for (int k = 0; k < K; ++k) {
        const auto md = direct.marginal(std::size_t(k)), mj = joint.marginal(std::size_t(k));
        std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> merged;
        for (const auto& [key, cnt] : md.counts()) merged[key[0]].first = cnt;
        for (const auto& [key, cnt] : mj.counts()) merged[key[0]].second = cnt;
        for (const auto& [v, cc] : merged)
            out.data.add_row({format_number(k + 1), format_number(v), format_number(cc.first),
                              format_number(cc.second)});
    }
    rep.runtime_s = seconds_since(t0);
    return out;
}

}  // namespace lpplab
