#pragma once

#include <cstdint>
#include <vector>

#include "lpplab/env.hpp"
#include "lpplab/stats.hpp"

namespace lpplab {

enum class SlopeBranch { generic, coexistence };

struct SlopeMapEval {
    double s = 0.0;
    double theta = 0.0;
    double xi = 0.0;
    SlopeBranch branch = SlopeBranch::generic;
};

// True when s sits on the coexistence line s = c >= 1.
bool on_coexistence_line(const ModelParams& params, double s);

// Slope of the invariant measure with parameter s in [r_c, 1/q).
double slope_T(const ModelParams& params, double s);
double slope_T_inverse(const ModelParams& params, double theta);

// Geodesic direction associated with a slope, and its inverse on (0, xi_max].
double direction_X(const ModelParams& params, double theta);
double direction_X_inverse(const ModelParams& params, double xi);

SlopeMapEval evaluate_slope_maps(const ModelParams& params, double s);

// Parameter s whose measure describes Busemann increments in direction xi in (0, xi_max].
double busemann_parameter(const ModelParams& params, double xi);

// Half-space shape function on kappa in [0,1]; kappa = 1 is the diagonal.
double shape_rho(const ModelParams& params, double kappa);
double shape_rho_fullspace(double q, double kappa);
// Start of the linear facet (kappa beyond which the boundary branch applies); 1 when c <= 1.
double shape_branch_point(const ModelParams& params);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool singleton() const { return lo == hi; }
};

// Maximisers of xi -> theta*xi + rho_c(1 - xi) over [0,1].
Interval maximizer_interval(const ModelParams& params, double theta);

struct MeasureSample {
    double s = 0.0;
    std::vector<std::int64_t> values;  // f(1), ..., f(K)
};

struct JointSample {
    std::vector<double> s;                         // in caller order
    std::vector<std::vector<std::int64_t>> rows;   // rows[r][k-1] = f_r(k)
};

MeasureSample sample_mu(const ModelParams& params, double s, int K, RandomStream& rng);

// Exact joint pmf of (f(1), ..., f(K)) for K <= 3 with total truncated mass <= tail_tol.
ExactPmf pmf_mu_prefix(const ModelParams& params, double s, int K, double tail_tol = 1e-11);

JointSample sample_joint(const ModelParams& params, const std::vector<double>& s_list, int K,
                         RandomStream& rng, double eps = 0.0);

}  // namespace lpplab
