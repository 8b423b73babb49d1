#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lpplab/env.hpp"
#include "lpplab/stats.hpp"

namespace lpplab {

struct Signature2 {
    std::int64_t lambda1 = 0;
    std::int64_t lambda2 = 0;

    std::int64_t gap() const { return lambda1 - lambda2; }
    std::int64_t size() const { return lambda1 + lambda2; }
    bool valid() const { return lambda1 >= lambda2; }
    auto operator<=>(const Signature2&) const = default;
};

// mu precedes lambda: lambda1 >= mu1 >= lambda2 >= mu2.
bool interlaces(const Signature2& mu, const Signature2& lambda);

// s_{lambda/mu}(x) in one variable.
double skew_schur_1var(const Signature2& lambda, const Signature2& mu, double x);

// Gap-k weight of length-n chains from (ell, 0), by direct summation (n <= 5).
// trunc bounds each step's growth; 0 selects q^trunc < 1e-14.
double u_exact(int n, std::int64_t k, std::int64_t ell, double q, int trunc = 0);

// Same quantity by trapezoidal quadrature of the oscillatory integral.
// nodes below max(4096, 8(n+k+ell)) are raised to that bound.
double u_quadrature(int n, std::int64_t k, std::int64_t ell, double q, std::size_t nodes = 0);

// All ell in [0, ell_max] at once on a shared node set.
std::vector<double> u_quadrature_row(int n, std::int64_t k, std::int64_t ell_max, double q);

// Sum_j c^j u_n^k(j), via the closed kernel sin(t)/(1 - 2c cos(t) + c^2).
double h_denominator(int n, std::int64_t k, double q, double c);

double h_val(int x, int n, std::int64_t k, std::int64_t ell, double q, double c);

// Chain (lambda^0, ..., lambda^n) with lambda^0_2 = 0 and final gap k: the recentred
// interlacing Gibbs law as a Markov chain driven by h-ratios. h(x, .) is built by the
// backward branching rule; the normaliser comes from the closed kernel quadrature.
class FiniteChain {
public:
    FiniteChain(int n, std::int64_t k, double q, double c);

    std::vector<Signature2> sample(RandomStream& rng) const;

    double initial_probability(std::int64_t gap) const;
    double transition_probability(int x, const Signature2& mu, const Signature2& lambda) const;

    // Largest |row sum - 1| over the initial law and every transition row.
    double max_row_error() const { return max_row_error_; }

    // Exact law of lambda^t for each t, propagated through the kernel.
    std::vector<ExactPmf> exact_marginals() const;

    int length() const { return n_; }
    std::int64_t final_gap() const { return k_; }
    std::int64_t max_gap() const { return gap_max_; }

private:
    struct Move {
        std::int64_t a, b;
        double p;
    };

    double h(int x, std::int64_t gap) const;
    const std::vector<Move>& row(int x, std::int64_t gap) const;

    int n_;
    std::int64_t k_;
    double q_, c_;
    std::int64_t gap_max_;
    std::vector<std::vector<double>> h_;   // h_[x][gap]
    std::vector<double> initial_;          // initial_[gap]
    std::vector<std::vector<std::vector<Move>>> rows_;  // rows_[x][gap]
    double max_row_error_ = 0.0;
};

std::vector<Signature2> finite_chain_sample(int n, std::int64_t k, double q, double c,
                                            RandomStream& rng);

// Time-homogeneous limit of the finite chain.
std::vector<Signature2> limit_chain_sample(int len, double q, double c, RandomStream& rng);

struct AuxChain {
    std::vector<Signature2> lambda;  // lambda^0 .. lambda^len
    std::vector<std::int64_t> queue; // V_0 .. V_len
    std::int64_t u = 0;
    std::int64_t y = 0;
    std::vector<std::int64_t> a, b;  // A_1.., B_1..
};

// Queueing chain: lambda^0 = (U+Y, 0), V_0 = Y,
// lambda2 += min(A, V), lambda1 += B + (A - V)^+, V <- B + (V - A)^+.
AuxChain aux_chain_sample(int len, double q, double c, RandomStream& rng);

// V_k = Y + S2(k) - S1(k) + R_k with R_k = (max_{l<=k}[S1(l) - S2(l-1)] - Y)^+, S1 = sum A, S2 = sum B.
bool aux_identity_holds(const AuxChain& chain);

struct TwoLayerPath {
    std::vector<std::int64_t> upper;  // B1(0..m)
    std::vector<std::int64_t> lower;  // B2(0..m)

    int m() const { return static_cast<int>(upper.size()) - 1; }
    Signature2 at(int t) const { return {upper[static_cast<std::size_t>(t)], lower[static_cast<std::size_t>(t)]}; }
};

// Interlacing Gibbs law on two nondecreasing paths with B(m) = (y1, y2),
// B1(j) >= B2(j+1), weight c^{B1(0)-B2(0)} q^{-B1(0)-B2(0)}, truncated at B2(0) >= y2 - depth.
class GibbsLaw {
public:
    GibbsLaw(int m, std::int64_t y1, std::int64_t y2, double q, double c, std::int64_t depth);

    int m() const { return m_; }
    std::int64_t depth() const { return depth_; }
    double normalizer() const { return z_; }  // relative to the weight scale q^{-(y1+y2)}

    bool in_support(const TwoLayerPath& path) const;
    double probability(const TwoLayerPath& path) const;

    // Law of lambda^t - (B2(0), B2(0)) for each t in [0, m].
    std::vector<ExactPmf> recentered_marginals() const;

    // Explicit list of every path with its probability; throws past `limit` paths.
    std::vector<std::pair<TwoLayerPath, double>> enumerate(std::size_t limit) const;

private:
    double start_weight(std::int64_t l1, std::int64_t l2) const;
    std::size_t cell(std::int64_t l1, std::int64_t l2) const;
    std::vector<double> forward(std::vector<double> f) const;

    int m_;
    std::int64_t y1_, y2_;
    double q_, c_;
    std::int64_t depth_;
    std::int64_t lo_;    // smallest coordinate value
    std::int64_t width_; // y1 - lo + 1
    std::vector<std::vector<double>> to_end_;  // to_end_[t][cell]: chains from cell at t to (y1,y2)
    double z_ = 0.0;
};

// Builds the law and verifies that doubling the depth changes the normaliser by <= 1e-12
// relative; throws with a suggested depth otherwise.
GibbsLaw gibbs_enumerate(int m, std::int64_t y1, std::int64_t y2, double q, double c, std::int64_t depth);

// B(m) = y, B(j-1) = B(j) - Geo(p).
std::vector<std::int64_t> reversed_geo_walk(int m, std::int64_t y, double p, RandomStream& rng);

double c_of_h(double h, double q);
double c_of_h_quadrature(double h, double q);

}  // namespace lpplab
