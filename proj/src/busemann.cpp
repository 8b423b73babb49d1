#include "lpplab/busemann.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace lpplab {

namespace {

std::string cell_text(const char* what, Coord k) { return std::string(what) + " at column " + std::to_string(k); }

}  // namespace

LatticeSite busemann_source(double xi, Coord n) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("xi must lie in [0,1]");
    if (n < 1) throw std::invalid_argument("depth must be positive");
    return {-static_cast<Coord>(std::floor(xi * static_cast<double>(n))), -n};
}

BusemannSlice busemann_slice(const WeightField& field, double xi, Coord n, Coord t, Coord K) {
    if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("xi must lie in (0,1]");
    if (K < 1) throw std::invalid_argument("K must be positive");
    const LatticeSite v = busemann_source(xi, n);
    if (!(t > -n)) throw std::invalid_argument("slice row must lie above the source row");
    if (t < v.i) throw std::invalid_argument("slice diagonal (t,t) is left of the source");
    const auto row = point_source_row(field, v, t, t + K);
    BusemannSlice out{xi, n, t, {}};
    for (Coord k = 1; k <= K; ++k) out.increments.push_back(row.at(t + k) - row.at(t + k - 1));
    return out;
}

MonotonicityReport xi_monotonicity_check(const WeightField& field, double xi_low, double xi_high,
                                         Coord n, Coord t, Coord K) {
    if (!(xi_low <= xi_high)) throw std::invalid_argument("need xi_low <= xi_high");
    if (K < 2) throw std::invalid_argument("K must be at least 2");
    const LatticeSite left = busemann_source(xi_high, n);
    const LatticeSite right = busemann_source(xi_low, n);
    if (t < right.i || !(t > -n)) throw std::invalid_argument("slice row outside both cones");

    struct Rows {
        PassageRow lower, upper;
    };
    const auto rows_of = [&](LatticeSite src) {
        return Rows{point_source_row(field, src, t, t + K), point_source_row(field, src, t + 1, t + K)};
    };
    const Rows a = rows_of(left);
    const Rows b = rows_of(right);

    MonotonicityReport rep;
    const auto note = [&rep](bool holds, std::string what) {
        if (!holds) {
            rep.ok = false;
            rep.violations.push_back(std::move(what));
        }
    };
    const auto horizontal = [&](const Rows& r, Coord k) { return r.lower.at(k) - r.lower.at(k - 1); };
    const auto vertical = [&](const Rows& r, Coord k) { return r.upper.at(k) - r.lower.at(k); };

    for (Coord k = t + 1; k <= t + K; ++k) {
        ++rep.horizontal_checks;
        note(horizontal(a, k) <= horizontal(b, k), cell_text("horizontal order", k));
        ++rep.vertical_checks;
        note(vertical(a, k) >= vertical(b, k), cell_text("vertical order", k));
    }
    for (const Rows* r : {&a, &b}) {
        for (Coord k = t + 1; k < t + K; ++k) {
            ++rep.recursion_checks;
            const Weight expected =
                field.weight(k + 1, t + 1) + std::max<Weight>(vertical(*r, k) - horizontal(*r, k + 1), 0);
            note(vertical(*r, k + 1) == expected, cell_text("vertical recursion", k + 1));
        }
    }
    return rep;
}

double pinning_fraction(const WeightField& field, Coord n, TieBreak ties) {
    if (n < 1) throw std::invalid_argument("depth must be positive");
    const auto table = point_table(field, {-n, -n}, 0, 0);
    const auto path = ties == TieBreak::rightmost ? trace_rightmost_geodesic(table, {0, 0})
                                                  : trace_leftmost_geodesic(table, {0, 0});
    Coord hits = 0;
    for (const auto& s : path)
        if (s.on_diagonal() && s.j < 0) ++hits;
    return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<LatticeSite> busemann_geodesic(const WeightField& field, double xi, Coord n) {
    const LatticeSite v = busemann_source(xi, n);
    const auto table = point_table(field, v, 0, 0);
    return trace_rightmost_geodesic(table, {0, 0});
}

double local_slope(const std::vector<LatticeSite>& path, Coord row_lo, Coord row_hi) {
    if (!(row_lo < row_hi)) throw std::invalid_argument("need row_lo < row_hi");
    std::map<Coord, Coord> rightmost;
    for (const auto& s : path) {
        auto [it, inserted] = rightmost.emplace(s.j, s.i);
        if (!inserted) it->second = std::max(it->second, s.i);
    }
    if (!rightmost.contains(row_lo) || !rightmost.contains(row_hi))
        throw std::invalid_argument("path does not reach both rows");
    return static_cast<double>(rightmost[row_hi] - rightmost[row_lo]) /
           static_cast<double>(row_hi - row_lo);
}

double direction_estimate(const WeightField& field, double xi, Coord n) {
    if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0,1)");
    if (n < 2) throw std::invalid_argument("depth must be at least 2");
    const auto path = busemann_geodesic(field, xi, n);
    return local_slope(path, -n / 2, 0);
}

}  // namespace lpplab
