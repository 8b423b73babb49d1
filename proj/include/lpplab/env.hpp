#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <vector>

namespace lpplab {

using Coord = std::int64_t;
using Weight = std::int64_t;

// Model parameters (q, c) with derived r_c and xi_max. Validated on construction.
class ModelParams {
public:
    ModelParams(double q, double c);

    double q() const { return q_; }
    double c() const { return c_; }
    double r_c() const { return c_ > 1.0 ? c_ : 1.0; }
    double xi_max() const;

    double diagonal_alpha() const { return c_ * q_; }
    double bulk_alpha() const { return q_ * q_; }

private:
    double q_;
    double c_;
};

// Column i, row j. The half-space is i >= j.
struct LatticeSite {
    Coord i = 0;
    Coord j = 0;

    bool in_half_space() const { return i >= j; }
    bool on_diagonal() const { return i == j; }
    auto operator<=>(const LatticeSite&) const = default;
};

// floor(ln u / ln alpha); 0 when alpha == 0. Rejects alpha >= 1 and u outside (0,1).
std::int64_t geo_inverse_cdf(double alpha, double u);

// Same map as geo_inverse_cdf, evaluated by scanning precomputed thresholds alpha^k.
// Draws within rounding distance of a threshold fall back to the logarithm formula,
// so results agree with geo_inverse_cdf exactly.
class GeometricTable {
public:
    explicit GeometricTable(double alpha);

    std::int64_t operator()(double u) const;
    double alpha() const { return alpha_; }

private:
    double alpha_;
    std::vector<double> thresholds_;
};

// 64-bit avalanche finalizer (splitmix64).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Maps 64 random bits to a uniform variate in the open interval (0,1).
constexpr double bits_to_uniform(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

// Pure hash of (seed, i, j, tag); different tags give independent environments.
std::uint64_t site_bits(std::uint64_t seed, Coord i, Coord j, std::uint64_t tag = 0);

inline double site_uniform(std::uint64_t seed, Coord i, Coord j, std::uint64_t tag = 0) {
    return bits_to_uniform(site_bits(seed, i, j, tag));
}

// Seed of child stream `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Counter-based generator: output n is mix64(key + n * golden). Copyable, deterministic.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    double uniform() { return bits_to_uniform((*this)()); }
    std::int64_t geometric(double alpha) { return geo_inverse_cdf(alpha, uniform()); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

// Homogeneous half-space environment: Geo(cq) on the diagonal, Geo(q^2) in the bulk.
class WeightField {
public:
    WeightField(const ModelParams& params, std::uint64_t seed);

    Weight weight_at(LatticeSite site) const;
    double parameter_at(LatticeSite site) const;

    // Unchecked lookup for solvers; caller guarantees i >= j.
    Weight weight(Coord i, Coord j) const {
        const double u = site_uniform(seed_, i, j);
        return i == j ? diagonal_(u) : bulk_(u);
    }

    const ModelParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

private:
    ModelParams params_;
    std::uint64_t seed_;
    GeometricTable diagonal_;
    GeometricTable bulk_;
};

// Explicit weights on a rectangle of columns [col_lo, col_hi] x rows [row_lo, row_hi].
// Used for pinned test instances and brute-force comparisons.
class WeightGrid {
public:
    WeightGrid(Coord col_lo, Coord col_hi, Coord row_lo, Coord row_hi);

    static WeightGrid sample(const WeightField& field, Coord col_lo, Coord col_hi,
                             Coord row_lo, Coord row_hi);

    Weight weight(Coord i, Coord j) const;
    void set(Coord i, Coord j, Weight w);

    Coord col_lo() const { return col_lo_; }
    Coord col_hi() const { return col_hi_; }
    Coord row_lo() const { return row_lo_; }
    Coord row_hi() const { return row_hi_; }

private:
    std::size_t index(Coord i, Coord j) const;

    Coord col_lo_, col_hi_, row_lo_, row_hi_;
    std::vector<Weight> values_;
};

// Inhomogeneous environment whose recentred passage times realise the joint
// invariant measure for decreasing parameters s_1 > ... > s_m.
// Extended parameters: s_{2m+1-i} = (1-eps)/s_i, s_i = q beyond 2m.
// Bulk (i,j): Geo(s_i s_j); diagonal (r,r): Geo(c s_r); start vertices (2m+1-i, i): 0.
class InhomogeneousField {
public:
    InhomogeneousField(const ModelParams& params, std::vector<double> s_desc, double eps,
                       std::uint64_t seed);

    int m() const { return static_cast<int>(s_.size()); }
    double extended_s(Coord index) const;
    bool is_start_vertex(LatticeSite site) const;

    // Geometric parameter at a site; throws when it would be >= 1.
    double parameter_at(LatticeSite site) const;
    Weight weight_at(LatticeSite site) const;
    Weight weight(Coord i, Coord j) const { return weight_at({i, j}); }

    LatticeSite start_vertex(int row) const { return {2 * m() + 1 - row, row}; }

private:
    ModelParams params_;
    std::vector<double> s_;
    double eps_;
    std::uint64_t seed_;
};

Weight inhom_weight_at(const ModelParams& params, const std::vector<double>& s_desc, double eps,
                       LatticeSite site, std::uint64_t seed);

}  // namespace lpplab
