#include "lpplab/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace lpplab {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kColumnMul = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kRowMul = 0xabc98388fb8fac03ULL;
constexpr std::uint64_t kInhomogeneousTag = 0x5bd1e995ULL;

std::string site_text(LatticeSite s) {
    std::ostringstream os;
    os << "(" << s.i << "," << s.j << ")";
    return os.str();
}

}  // namespace

ModelParams::ModelParams(double q, double c) : q_(q), c_(c) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
    if (!(c >= 0.0 && c * q < 1.0)) throw std::invalid_argument("c must lie in [0, 1/q)");
}

double ModelParams::xi_max() const {
    if (c_ <= 1.0) return 1.0;
    const double r = (1.0 - q_ * c_) / (c_ - q_);
    return r * r;
}

std::int64_t geo_inverse_cdf(double alpha, double u) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("geometric parameter must lie in [0,1)");
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("uniform variate must lie in (0,1)");
    if (alpha == 0.0) return 0;
    return static_cast<std::int64_t>(std::floor(std::log(u) / std::log(alpha)));
}

GeometricTable::GeometricTable(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("geometric parameter must lie in [0,1)");
    if (alpha == 0.0) return;
    for (int k = 1;; ++k) {
        const double t = std::pow(alpha, k);
        if (t < 0x1p-54) break;
        thresholds_.push_back(t);
    }
}

std::int64_t GeometricTable::operator()(double u) const {
    if (alpha_ == 0.0) return 0;
    std::size_t k = 0;
    const std::size_t n = thresholds_.size();
    while (k < n && thresholds_[k] >= u) ++k;
    constexpr double rel = 1e-9;
    const bool near_upper = k < n && (u - thresholds_[k]) <= rel * u;
    const bool near_lower = k > 0 && (thresholds_[k - 1] - u) <= rel * u;
    if (k == n || near_upper || near_lower) return geo_inverse_cdf(alpha_, u);
    return static_cast<std::int64_t>(k);
}

std::uint64_t site_bits(std::uint64_t seed, Coord i, Coord j, std::uint64_t tag) {
    std::uint64_t h = mix64(seed + kGolden + tag * 0x632be59bd9b4e019ULL);
    h = mix64(h ^ (static_cast<std::uint64_t>(i) * kColumnMul + kGolden));
    h = mix64(h ^ (static_cast<std::uint64_t>(j) * kRowMul + 0x94d049bb133111ebULL));
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master ^ 0x2545f4914f6cdd1dULL) + (index + 1) * kGolden);
}

RandomStream::result_type RandomStream::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

WeightField::WeightField(const ModelParams& params, std::uint64_t seed)
    : params_(params),
      seed_(seed),
      diagonal_(params.diagonal_alpha()),
      bulk_(params.bulk_alpha()) {}

double WeightField::parameter_at(LatticeSite site) const {
    if (!site.in_half_space())
        throw std::invalid_argument("site " + site_text(site) + " is outside the half-space");
    return site.on_diagonal() ? params_.diagonal_alpha() : params_.bulk_alpha();
}

Weight WeightField::weight_at(LatticeSite site) const {
    if (!site.in_half_space())
        throw std::invalid_argument("site " + site_text(site) + " is outside the half-space");
    return weight(site.i, site.j);
}

WeightGrid::WeightGrid(Coord col_lo, Coord col_hi, Coord row_lo, Coord row_hi)
    : col_lo_(col_lo), col_hi_(col_hi), row_lo_(row_lo), row_hi_(row_hi) {
    if (col_hi < col_lo || row_hi < row_lo) throw std::invalid_argument("empty weight grid");
    values_.assign(static_cast<std::size_t>((col_hi - col_lo + 1) * (row_hi - row_lo + 1)), 0);
}

WeightGrid WeightGrid::sample(const WeightField& field, Coord col_lo, Coord col_hi, Coord row_lo,
                              Coord row_hi) {
    WeightGrid g(col_lo, col_hi, row_lo, row_hi);
    for (Coord j = row_lo; j <= row_hi; ++j)
        for (Coord i = std::max(col_lo, j); i <= col_hi; ++i) g.set(i, j, field.weight(i, j));
    return g;
}

std::size_t WeightGrid::index(Coord i, Coord j) const {
    if (i < col_lo_ || i > col_hi_ || j < row_lo_ || j > row_hi_)
        throw std::out_of_range("site " + site_text({i, j}) + " outside weight grid");
    return static_cast<std::size_t>((j - row_lo_) * (col_hi_ - col_lo_ + 1) + (i - col_lo_));
}

Weight WeightGrid::weight(Coord i, Coord j) const { return values_[index(i, j)]; }

void WeightGrid::set(Coord i, Coord j, Weight w) {
    if (w < 0) throw std::invalid_argument("weights are nonnegative");
    values_[index(i, j)] = w;
}

InhomogeneousField::InhomogeneousField(const ModelParams& params, std::vector<double> s_desc,
                                       double eps, std::uint64_t seed)
    : params_(params), s_(std::move(s_desc)), eps_(eps), seed_(seed) {
    if (s_.empty()) throw std::invalid_argument("parameter list is empty");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0,1)");
    for (std::size_t a = 0; a < s_.size(); ++a) {
        const double s = s_[a];
        if (!(s >= params_.r_c() && s * params_.q() < 1.0))
            throw std::invalid_argument("parameters must lie in [r_c, 1/q)");
        if (a > 0 && !(s < s_[a - 1]))
            throw std::invalid_argument("parameters must be strictly decreasing");
    }
}

double InhomogeneousField::extended_s(Coord index) const {
    const Coord mm = m();
    if (index < 1) throw std::invalid_argument("parameter index must be positive");
    if (index <= mm) return s_[static_cast<std::size_t>(index - 1)];
    if (index <= 2 * mm) return (1.0 - eps_) / s_[static_cast<std::size_t>(2 * mm - index)];
    return params_.q();
}

bool InhomogeneousField::is_start_vertex(LatticeSite site) const {
    return site.j >= 1 && site.j <= m() && site.i == 2 * m() + 1 - site.j;
}

double InhomogeneousField::parameter_at(LatticeSite site) const {
    if (!site.in_half_space() || site.j < 1)
        throw std::invalid_argument("site " + site_text(site) + " outside the joint environment");
    const double alpha = site.on_diagonal() ? params_.c() * extended_s(site.j)
                                            : extended_s(site.i) * extended_s(site.j);
    if (!is_start_vertex(site) && !(alpha < 1.0)) {
        std::ostringstream os;
        os << "weight at " << site_text(site) << " would need Geo(" << alpha
           << "), parameter >= 1";
        throw std::domain_error(os.str());
    }
    return alpha;
}

Weight InhomogeneousField::weight_at(LatticeSite site) const {
    const double alpha = parameter_at(site);
    if (is_start_vertex(site)) return 0;
    return geo_inverse_cdf(alpha, site_uniform(seed_, site.i, site.j, kInhomogeneousTag));
}

Weight inhom_weight_at(const ModelParams& params, const std::vector<double>& s_desc, double eps,
                       LatticeSite site, std::uint64_t seed) {
    return InhomogeneousField(params, s_desc, eps, seed).weight_at(site);
}

}  // namespace lpplab
