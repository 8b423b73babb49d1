#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpplab/env.hpp"

namespace lpplab {

template <class W>
concept WeightSource = requires(const W& w, Coord i, Coord j) {
    { w.weight(i, j) } -> std::convertible_to<Weight>;
};

inline constexpr Weight kUnreachable = std::numeric_limits<Weight>::min() / 4;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Initial condition on row base_level - 1, defined on columns base_level, base_level + 1, ...
struct Profile {
    Coord base_level = 0;
    std::vector<double> values;

    Coord last_column() const { return base_level + static_cast<Coord>(values.size()) - 1; }
    // f(i) for i in [base_level, last_column]; f(base_level - 1) = 0 by convention.
    double at(Coord i) const;
    void require_columns(Coord hi) const;
};

// Passage values on rows [base_level - 1, row_hi]. Row base_level - 1 holds the boundary data;
// row r >= base_level holds columns [max(col_lo, r), col_hi]. Unreachable cells are -inf.
class PassageTable {
public:
    enum class Source { point, profile };

    PassageTable(Source source, LatticeSite point, Coord base_level, Coord col_lo, Coord col_hi,
                 Coord row_hi);

    Source source() const { return source_; }
    LatticeSite source_site() const { return point_; }
    Coord base_level() const { return base_; }
    Coord col_lo() const { return col_lo_; }
    Coord col_hi() const { return col_hi_; }
    Coord row_hi() const { return row_hi_; }

    bool contains(Coord i, Coord j) const;
    Coord row_start(Coord j) const { return j < base_ ? col_lo_ : std::max(col_lo_, j); }
    double value(Coord i, Coord j) const;  // -inf outside the table
    void set(Coord i, Coord j, double v);

private:
    std::size_t index(Coord i, Coord j) const;

    Source source_;
    LatticeSite point_;
    Coord base_, col_lo_, col_hi_, row_hi_;
    std::vector<std::size_t> row_offset_;
    std::vector<double> values_;
};

namespace detail {

template <class V>
constexpr V unreachable() {
    if constexpr (std::is_floating_point_v<V>) return kNegInf;
    else return kUnreachable;
}

// Row recursion over rows [base, row_hi]; `below` holds row base - 1 on [col_lo, col_hi].
// on_row(r, first_col, values) is called once per row.
template <class V, WeightSource W, class OnRow>
void sweep(const W& w, Coord base, Coord col_lo, Coord col_hi, std::vector<V> below, Coord row_hi,
           OnRow&& on_row) {
    const V neg = unreachable<V>();
    const std::size_t width = static_cast<std::size_t>(col_hi - col_lo + 1);
    std::vector<V> cur(width, neg);
    for (Coord r = base; r <= row_hi; ++r) {
        const Coord start = std::max(col_lo, r);
        std::fill(cur.begin(), cur.end(), neg);
        for (Coord i = start; i <= col_hi; ++i) {
            const std::size_t k = static_cast<std::size_t>(i - col_lo);
            const V down = below[k];
            const V left = (i > start) ? cur[k - 1] : neg;
            const V best = std::max(down, left);
            cur[k] = best == neg ? neg : best + static_cast<V>(w.weight(i, r));
        }
        on_row(r, start, cur);
        std::swap(cur, below);
    }
}

template <class V>
std::vector<V> point_boundary(Coord col_lo, Coord col_hi) {
    std::vector<V> b(static_cast<std::size_t>(col_hi - col_lo + 1), unreachable<V>());
    b[0] = V(0);
    return b;
}

}  // namespace detail

// Values G(from, (i, row)) for i in [first_column, col_hi].
struct PassageRow {
    Coord row = 0;
    Coord first_column = 0;
    std::vector<Weight> values;

    Weight at(Coord i) const { return values.at(static_cast<std::size_t>(i - first_column)); }
};

template <WeightSource W>
PassageRow point_source_row(const W& w, LatticeSite from, Coord row, Coord col_hi) {
    if (!from.in_half_space()) throw std::invalid_argument("source outside the half-space");
    if (row < from.j || col_hi < std::max(from.i, row))
        throw std::invalid_argument("target row/columns not above-right of the source");
    PassageRow out{row, std::max(from.i, row), {}};
    detail::sweep<Weight>(w, from.j, from.i, col_hi, detail::point_boundary<Weight>(from.i, col_hi),
                          row, [&](Coord r, Coord start, const std::vector<Weight>& v) {
                              if (r == row)
                                  out.values.assign(v.begin() + (start - from.i), v.end());
                          });
    return out;
}

template <WeightSource W>
Weight passage_time(const W& w, LatticeSite from, LatticeSite to) {
    if (!from.in_half_space() || !to.in_half_space())
        throw std::invalid_argument("endpoints must lie in the half-space");
    if (from.i > to.i || from.j > to.j) throw std::invalid_argument("from must be <= to");
    return point_source_row(w, from, to.j, to.i).values.back();
}

// G_{f,j}(n+k, n) for k in [0, K].
template <WeightSource W>
std::vector<double> passage_profile(const W& w, const Profile& f, Coord n, Coord K) {
    if (n < f.base_level || K < 0) throw std::invalid_argument("target row below base level");
    const Coord col_hi = n + K;
    f.require_columns(col_hi);
    std::vector<double> boundary(f.values.begin(), f.values.begin() + (col_hi - f.base_level + 1));
    std::vector<double> out;
    detail::sweep<double>(w, f.base_level, f.base_level, col_hi, std::move(boundary), n,
                          [&](Coord r, Coord start, const std::vector<double>& v) {
                              if (r == n) out.assign(v.begin() + (start - f.base_level), v.end());
                          });
    return out;
}

// One row of the recursion: state(k) = G(n-1+k, n-1), k in [0,K] -> G(n+k, n), k in [0,K-1].
template <WeightSource W>
std::vector<double> evolve_step(const W& w, const std::vector<double>& state, Coord n) {
    if (state.empty()) throw std::invalid_argument("empty state");
    const std::size_t K = state.size() - 1;
    std::vector<double> next(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double reach = k == 0 ? state[1] : std::max(next[k - 1], state[k + 1]);
        next[k] = reach + static_cast<double>(w.weight(n + static_cast<Coord>(k), n));
    }
    return next;
}

// Profile on base level j as an evolve_step state on row j-1: (0, f(j), f(j+1), ...).
std::vector<double> profile_state(const Profile& f);

// state(k) - state(0), k in [1, K].
std::vector<double> recenter(const std::vector<double>& state);

template <WeightSource W>
PassageTable profile_table(const W& w, const Profile& f, Coord col_hi, Coord row_hi) {
    if (row_hi < f.base_level - 1) throw std::invalid_argument("row range below base level");
    f.require_columns(col_hi);
    PassageTable t(PassageTable::Source::profile, {f.base_level, f.base_level}, f.base_level,
                   f.base_level, col_hi, row_hi);
    std::vector<double> boundary(f.values.begin(),
                                 f.values.begin() + (col_hi - f.base_level + 1));
    for (Coord i = f.base_level; i <= col_hi; ++i) t.set(i, f.base_level - 1, f.at(i));
    detail::sweep<double>(w, f.base_level, f.base_level, col_hi, std::move(boundary), row_hi,
                          [&](Coord r, Coord start, const std::vector<double>& v) {
                              for (Coord i = start; i <= col_hi; ++i)
                                  t.set(i, r, v[static_cast<std::size_t>(i - f.base_level)]);
                          });
    return t;
}

template <WeightSource W>
PassageTable point_table(const W& w, LatticeSite from, Coord col_hi, Coord row_hi) {
    if (!from.in_half_space()) throw std::invalid_argument("source outside the half-space");
    if (row_hi < from.j || col_hi < std::max(from.i, row_hi))
        throw std::invalid_argument("table window not above-right of the source");
    PassageTable t(PassageTable::Source::point, from, from.j, from.i, col_hi, row_hi);
    t.set(from.i, from.j - 1, 0.0);
    detail::sweep<double>(w, from.j, from.i, col_hi, detail::point_boundary<double>(from.i, col_hi),
                          row_hi, [&](Coord r, Coord start, const std::vector<double>& v) {
                              for (Coord i = start; i <= col_hi; ++i)
                                  t.set(i, r, v[static_cast<std::size_t>(i - from.i)]);
                          });
    return t;
}

// Backtracks from root: down when i == j or value(i, j-1) >= value(i-1, j), else left.
// Profile tables end at the boundary site (Z, base-1); point tables end at the source.
std::vector<LatticeSite> trace_rightmost_geodesic(const PassageTable& table, LatticeSite root);

// Same backtrack with ties resolved to the left (toward the diagonal).
std::vector<LatticeSite> trace_leftmost_geodesic(const PassageTable& table, LatticeSite root);

// Sum of weights along a traced path, excluding boundary-row sites.
template <WeightSource W>
Weight path_weight(const W& w, const std::vector<LatticeSite>& path, Coord base_level) {
    Weight total = 0;
    for (const auto& s : path)
        if (s.j >= base_level) total += w.weight(s.i, s.j);
    return total;
}

// Rightmost maximiser Z_{f,j}(m,n) of i -> f(i) + G((i,j),(m,n)).
template <WeightSource W>
Coord exit_point(const W& w, const Profile& f, LatticeSite target) {
    if (target.j < f.base_level || !target.in_half_space())
        throw std::invalid_argument("target below base level or outside the half-space");
    const auto table = profile_table(w, f, target.i, target.j);
    return trace_rightmost_geodesic(table, target).back().i;
}

struct CrossingReport {
    bool ok = true;
    std::size_t checks = 0;
    std::vector<std::string> violations;

    void record(bool holds, const std::string& witness) {
        ++checks;
        if (!holds) {
            ok = false;
            violations.push_back(witness);
        }
    }
};

// Paths-crossing inequalities for two profiles on one base level and l >= m >= n:
// (a) Z_{f1}(l,n) <= Z_{f2}(m,n)  =>  increments of f1 between m and l are <= those of f2;
// (b) point-source increments are nondecreasing in the source column;
// (c) p >= Z_f(l,n) => profile increment <= point increment from p;
//     p <= Z_f(m,n) => profile increment >= point increment from p.
template <WeightSource W>
CrossingReport crossing_inequalities_check(const W& w, const Profile& f1, const Profile& f2,
                                           Coord l, Coord m, Coord n) {
    if (f1.base_level != f2.base_level) throw std::invalid_argument("profiles on different levels");
    if (!(l >= m && m >= n && n >= f1.base_level))
        throw std::invalid_argument("need l >= m >= n >= base level");
    const Coord j = f1.base_level;
    CrossingReport rep;
    const auto t1 = profile_table(w, f1, l, n);
    const auto t2 = profile_table(w, f2, l, n);
    const auto exit_of = [](const PassageTable& t, Coord col, Coord row) {
        return trace_rightmost_geodesic(t, {col, row}).back().i;
    };
    const double inc1 = t1.value(l, n) - t1.value(m, n);
    const double inc2 = t2.value(l, n) - t2.value(m, n);
    const std::string where = " l=" + std::to_string(l) + " m=" + std::to_string(m) +
                              " n=" + std::to_string(n);
    if (exit_of(t1, l, n) <= exit_of(t2, m, n)) rep.record(inc1 <= inc2, "crossing(f1,f2)" + where);
    if (exit_of(t2, l, n) <= exit_of(t1, m, n)) rep.record(inc2 <= inc1, "crossing(f2,f1)" + where);

    std::vector<double> point_inc;
    for (Coord p = j; p <= m; ++p) {
        const auto row = point_source_row(w, LatticeSite{p, j}, n, l);
        point_inc.push_back(static_cast<double>(row.at(l) - row.at(m)));
    }
    for (std::size_t a = 1; a < point_inc.size(); ++a)
        rep.record(point_inc[a - 1] <= point_inc[a],
                   "source monotonicity p=" + std::to_string(j + static_cast<Coord>(a) - 1) + where);

    for (const PassageTable* t : {&t1, &t2}) {
        const double inc = t->value(l, n) - t->value(m, n);
        const Coord z_far = exit_of(*t, l, n);
        const Coord z_near = exit_of(*t, m, n);
        for (Coord p = j; p <= m; ++p) {
            const double pi = point_inc[static_cast<std::size_t>(p - j)];
            if (p >= z_far) rep.record(inc <= pi, "profile<=point p=" + std::to_string(p) + where);
            if (p <= z_near) rep.record(inc >= pi, "profile>=point p=" + std::to_string(p) + where);
        }
    }
    return rep;
}

// (G((i,j),(n,n)) in `field`, G((0,0),(n-j,n-i)) in `other`); equal in law when the
// two environments share parameters.
template <WeightSource W1, WeightSource W2>
std::pair<Weight, Weight> reflection_pair(const W1& field, const W2& other, LatticeSite from,
                                          Coord n) {
    if (!(0 <= from.j && from.j <= from.i && from.i <= n))
        throw std::invalid_argument("need 0 <= j <= i <= n");
    return {passage_time(field, from, {n, n}),
            passage_time(other, {0, 0}, {n - from.j, n - from.i})};
}

}  // namespace lpplab
