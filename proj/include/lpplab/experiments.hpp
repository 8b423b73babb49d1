#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpplab/env.hpp"

namespace lpplab {

// Pass rules for a single reported quantity.
enum class CheckRule {
    within_abs,  // |estimate - target| <= tolerance
    within_rel,  // |estimate - target| <= tolerance * |target|
    at_most,     // estimate <= tolerance
    at_least,    // estimate >= tolerance
    info         // reported only
};

const char* rule_name(CheckRule rule);

struct Check {
    std::string name;
    double estimate = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    CheckRule rule = CheckRule::info;

    bool pass() const;
};

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    std::vector<Check> checks;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;

    bool pass() const;
    const Check* find(const std::string& check_name) const;
    void add(std::string check_name, double estimate, double target, double tolerance, CheckRule rule);
};

// Raw per-replica data with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string str() const;
};

std::string format_number(double v);
std::string format_number(std::int64_t v);
inline std::string format_number(std::uint64_t v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

struct ExperimentResult {
    ExperimentReport report;
    CsvTable data;
};

// Named thresholds with calibrated defaults; see README for provenance.
class Tolerances {
public:
    Tolerances();

    double get(const std::string& name) const;
    void set(const std::string& name, double value);
    bool contains(const std::string& name) const { return values_.contains(name); }
    const std::map<std::string, double>& values() const { return values_; }

private:
    std::map<std::string, double> values_;
};

ExperimentResult run_shape(const ModelParams& params, double xi, Coord n, std::size_t reps,
                           std::uint64_t seed, const Tolerances& tol = {});

ExperimentResult run_invariance(const ModelParams& params, double s, Coord steps, std::size_t samples,
                                std::uint64_t seed, const Tolerances& tol = {}, int K = 3);

ExperimentResult run_recentered(const ModelParams& params, Coord n, std::size_t samples, int K,
                                std::uint64_t seed, const Tolerances& tol = {});

ExperimentResult run_1f1s(const ModelParams& params, double theta, Coord n, std::size_t samples, int K,
                          std::uint64_t seed, const Tolerances& tol = {});

ExperimentResult run_slope_conservation(const ModelParams& params, double theta, Coord rows, Coord window,
                                        std::uint64_t seed, const Tolerances& tol = {});

struct GibbsValidationSizes {
    std::size_t finite_chain_samples = 200000;
    std::size_t limit_chain_samples = 1000000;
    std::int64_t h_limit_m = 40000;
    std::int64_t c_limit_m = 10000;
};

ExperimentResult run_gibbs_validation(double q, double c, std::uint64_t seed, const Tolerances& tol = {},
                                      const GibbsValidationSizes& sizes = {});

ExperimentResult run_pinning(const ModelParams& params, Coord n, std::size_t reps, std::uint64_t seed,
                             const Tolerances& tol = {});

ExperimentResult run_direction(const ModelParams& params, double xi, Coord n, std::size_t reps,
                               std::uint64_t seed, const Tolerances& tol = {});

// Mean of the first Busemann increment at depth n against the invariant-measure mean,
// plus depth stability (n vs 1.25 n) on the first stability_reps replicas.
ExperimentResult run_busemann(const ModelParams& params, double xi, Coord n, std::size_t reps,
                              std::uint64_t seed, const Tolerances& tol = {}, std::size_t stability_reps = 100);

ExperimentResult run_xi_monotonicity(const ModelParams& params, double xi_low, double xi_high, Coord n,
                                     Coord K, std::size_t reps, std::uint64_t seed);

// Joint sampler at m = 1 against the direct sampler for the same parameter.
ExperimentResult run_sampler_equivalence(const ModelParams& params, double s, int K, std::size_t samples,
                                         std::uint64_t seed, const Tolerances& tol = {});

}  // namespace lpplab
