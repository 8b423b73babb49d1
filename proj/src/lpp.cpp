#include "lpplab/lpp.hpp"

#include <cmath>

namespace lpplab {

double Profile::at(Coord i) const {
    if (i == base_level - 1) return 0.0;
    if (i < base_level || i > last_column())
        throw std::out_of_range("profile read outside columns [" + std::to_string(base_level) +
                                ", " + std::to_string(last_column()) + "]");
    return values[static_cast<std::size_t>(i - base_level)];
}

void Profile::require_columns(Coord hi) const {
    if (values.empty() || last_column() < hi)
        throw std::invalid_argument("profile covers columns up to " +
                                    std::to_string(last_column()) + ", need " +
                                    std::to_string(hi));
    for (double v : values)
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw std::invalid_argument("profile values must be finite or -inf");
}

PassageTable::PassageTable(Source source, LatticeSite point, Coord base_level, Coord col_lo,
                           Coord col_hi, Coord row_hi)
    : source_(source), point_(point), base_(base_level), col_lo_(col_lo), col_hi_(col_hi),
      row_hi_(row_hi) {
    if (col_hi < col_lo || row_hi < base_level - 1) throw std::invalid_argument("empty table");
    std::size_t offset = 0;
    for (Coord r = base_ - 1; r <= row_hi_; ++r) {
        row_offset_.push_back(offset);
        const Coord start = row_start(r);
        if (start <= col_hi_) offset += static_cast<std::size_t>(col_hi_ - start + 1);
    }
    row_offset_.push_back(offset);
    values_.assign(offset, kNegInf);
}

bool PassageTable::contains(Coord i, Coord j) const {
    return j >= base_ - 1 && j <= row_hi_ && i >= row_start(j) && i <= col_hi_;
}

std::size_t PassageTable::index(Coord i, Coord j) const {
    return row_offset_[static_cast<std::size_t>(j - (base_ - 1))] +
           static_cast<std::size_t>(i - row_start(j));
}

double PassageTable::value(Coord i, Coord j) const {
    return contains(i, j) ? values_[index(i, j)] : kNegInf;
}

void PassageTable::set(Coord i, Coord j, double v) {
    if (!contains(i, j)) throw std::out_of_range("cell outside passage table");
    values_[index(i, j)] = v;
}

std::vector<double> profile_state(const Profile& f) {
    std::vector<double> s;
    s.reserve(f.values.size() + 1);
    s.push_back(0.0);
    s.insert(s.end(), f.values.begin(), f.values.end());
    return s;
}

std::vector<double> recenter(const std::vector<double>& state) {
    std::vector<double> out;
    if (state.empty()) return out;
    for (std::size_t k = 1; k < state.size(); ++k) out.push_back(state[k] - state[0]);
    return out;
}

std::vector<LatticeSite> trace_rightmost_geodesic(const PassageTable& table, LatticeSite root) {
    if (root.j < table.base_level() || !table.contains(root.i, root.j))
        throw std::invalid_argument("root outside the passage table");
    std::vector<LatticeSite> path{root};
    Coord i = root.i;
    Coord j = root.j;
    while (j >= table.base_level()) {
        if (i == j || table.value(i, j - 1) >= table.value(i - 1, j)) --j;
        else --i;
        path.push_back({i, j});
    }
    if (table.source() == PassageTable::Source::point) path.pop_back();
    return path;
}

std::vector<LatticeSite> trace_leftmost_geodesic(const PassageTable& table, LatticeSite root) {
    if (root.j < table.base_level() || !table.contains(root.i, root.j))
        throw std::invalid_argument("root outside the passage table");
    std::vector<LatticeSite> path{root};
    Coord i = root.i;
    Coord j = root.j;
    while (j >= table.base_level()) {
        if (i == j || table.value(i, j - 1) > table.value(i - 1, j)) --j;
        else --i;
        path.push_back({i, j});
    }
    if (table.source() == PassageTable::Source::point) path.pop_back();
    return path;
}

}  // namespace lpplab
