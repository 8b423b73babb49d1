#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpplab/env.hpp"
#include "lpplab/lpp.hpp"

namespace lpplab {

// Source of the depth-n approximation in direction xi: (-floor(xi n), -n).
LatticeSite busemann_source(double xi, Coord n);

struct BusemannSlice {
    double xi = 0.0;
    Coord depth = 0;
    Coord row = 0;
    std::vector<Weight> increments;  // W(k), k = 1..K
};

BusemannSlice busemann_slice(const WeightField& field, double xi, Coord n, Coord t, Coord K);

struct MonotonicityReport {
    bool ok = true;
    std::size_t horizontal_checks = 0;
    std::size_t vertical_checks = 0;
    std::size_t recursion_checks = 0;
    std::vector<std::string> violations;
};

// Compares sources v_left = source(xi_high) and v_right = source(xi_low) on row -n in one
// environment: horizontal increments along row t from the left source are <= those from
// the right source; vertical increments between rows t and t+1 are >=. Also checks
// J(k+1) = w(k+1, t+1) + (J(k) - I(k+1))^+ on both tables.
MonotonicityReport xi_monotonicity_check(const WeightField& field, double xi_low, double xi_high,
                                         Coord n, Coord t, Coord K);

enum class TieBreak { rightmost, leftmost };

// Traces the geodesic from (0,0) back to (-n,-n) and returns the fraction of rows
// r in [-n, -1] whose diagonal site (r,r) lies on it.
double pinning_fraction(const WeightField& field, Coord n, TieBreak ties = TieBreak::rightmost);

// Rightmost geodesic from (0,0) back to the source (-floor(xi n), -n).
std::vector<LatticeSite> busemann_geodesic(const WeightField& field, double xi, Coord n);

// (column displacement)/(row displacement) of the geodesic toward v_n at row -n/2.
double direction_estimate(const WeightField& field, double xi, Coord n);

// Column displacement per row of a path between rows row_lo < row_hi (both on the path),
// using the rightmost path site on each row.
double local_slope(const std::vector<LatticeSite>& path, Coord row_lo, Coord row_hi);

}  // namespace lpplab
