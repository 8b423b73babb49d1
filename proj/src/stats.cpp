#include "lpplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace lpplab {

namespace {

struct Cell {
    double observed_a;
    double observed_b;  // second sample count, or expected count for goodness of fit
};

struct WeightedCell {
    double weight;  // expected count deciding whether the cell stands alone
    Cell cell;
    bool always_pool = false;
};

// Pools cells with small weight into one; merges that pool into the smallest kept cell
// when it is itself too small.
std::vector<Cell> pool_cells(std::vector<WeightedCell> weighted, double min_cell) {
    std::vector<Cell> kept;
    std::vector<double> kept_weight;
    Cell rest{0.0, 0.0};
    double rest_weight = 0.0;
    for (const auto& [w, cell, always_pool] : weighted) {
        if (w >= min_cell && !always_pool) {
            kept.push_back(cell);
            kept_weight.push_back(w);
        } else {
            rest.observed_a += cell.observed_a;
            rest.observed_b += cell.observed_b;
            rest_weight += w;
        }
    }
    if (rest.observed_a > 0.0 || rest.observed_b > 0.0) {
        if (rest_weight >= min_cell || kept.empty()) {
            kept.push_back(rest);
        } else {
            const auto it = std::min_element(kept_weight.begin(), kept_weight.end());
            Cell& target = kept[static_cast<std::size_t>(it - kept_weight.begin())];
            target.observed_a += rest.observed_a;
            target.observed_b += rest.observed_b;
        }
    }
    return kept;
}

}  // namespace

void EmpiricalPmf::add(const PmfKey& key, std::uint64_t count) {
    if (!counts_.empty() && counts_.begin()->first.size() != key.size())
        throw std::invalid_argument("pmf keys must share one dimension");
    counts_[key] += count;
    total_ += count;
}

void EmpiricalPmf::merge(const EmpiricalPmf& other) {
    for (const auto& [k, n] : other.counts_) add(k, n);
}

std::uint64_t EmpiricalPmf::count(const PmfKey& key) const {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
}

double EmpiricalPmf::probability(const PmfKey& key) const {
    if (total_ == 0) throw std::invalid_argument("empty distribution");
    return static_cast<double>(count(key)) / static_cast<double>(total_);
}

std::size_t EmpiricalPmf::dimension() const {
    return counts_.empty() ? 0 : counts_.begin()->first.size();
}

EmpiricalPmf EmpiricalPmf::marginal(std::size_t coord) const {
    EmpiricalPmf out;
    for (const auto& [k, n] : counts_) out.add(PmfKey{k.at(coord)}, n);
    return out;
}

ExactPmf marginal(const ExactPmf& pmf, std::size_t coord) {
    ExactPmf out;
    for (const auto& [k, p] : pmf) out[PmfKey{k.at(coord)}] += p;
    return out;
}

double total_mass(const ExactPmf& pmf) {
    double s = 0.0;
    for (const auto& kv : pmf) s += kv.second;
    return s;
}

double tv_distance(const EmpiricalPmf& a, const EmpiricalPmf& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty distribution");
    const double na = static_cast<double>(a.total());
    const double nb = static_cast<double>(b.total());
    double s = 0.0;
    for (const auto& [k, n] : a.counts())
        s += std::abs(static_cast<double>(n) / na - static_cast<double>(b.count(k)) / nb);
    for (const auto& [k, n] : b.counts())
        if (a.count(k) == 0) s += static_cast<double>(n) / nb;
    return 0.5 * s;
}

double tv_distance(const EmpiricalPmf& a, const ExactPmf& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty distribution");
    const double na = static_cast<double>(a.total());
    double s = 0.0;
    for (const auto& [k, n] : a.counts()) {
        const auto it = b.find(k);
        s += std::abs(static_cast<double>(n) / na - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [k, p] : b)
        if (a.count(k) == 0) s += p;
    return 0.5 * s;
}

double tv_distance(const ExactPmf& a, const ExactPmf& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty distribution");
    double s = 0.0;
    for (const auto& [k, p] : a) {
        const auto it = b.find(k);
        s += std::abs(p - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [k, p] : b)
        if (!a.contains(k)) s += p;
    return 0.5 * s;
}

double max_marginal_tv(const EmpiricalPmf& a, const EmpiricalPmf& b) {
    double worst = 0.0;
    for (std::size_t d = 0; d < a.dimension(); ++d)
        worst = std::max(worst, tv_distance(a.marginal(d), b.marginal(d)));
    return worst;
}

double max_marginal_tv(const EmpiricalPmf& a, const ExactPmf& b) {
    double worst = 0.0;
    for (std::size_t d = 0; d < a.dimension(); ++d)
        worst = std::max(worst, tv_distance(a.marginal(d), marginal(b, d)));
    return worst;
}

double chi2_survival(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

Chi2Result chi2_two_sample(const EmpiricalPmf& a, const EmpiricalPmf& b, double min_cell) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty distribution");
    const double na = static_cast<double>(a.total());
    const double nb = static_cast<double>(b.total());
    std::set<PmfKey> keys;
    for (const auto& kv : a.counts()) keys.insert(kv.first);
    for (const auto& kv : b.counts()) keys.insert(kv.first);
    std::vector<WeightedCell> weighted;
    for (const auto& k : keys) {
        const double ca = static_cast<double>(a.count(k));
        const double cb = static_cast<double>(b.count(k));
        const double pooled = ca + cb;
        const double expected_min = pooled * std::min(na, nb) / (na + nb);
        weighted.push_back({expected_min, {ca, cb}, false});
    }
    const auto cells = pool_cells(std::move(weighted), min_cell);
    Chi2Result r;
    r.cells = cells.size();
    if (cells.size() < 2) {
        r.warning = "single cell after pooling; p-value set to 1";
        return r;
    }
    const double k1 = std::sqrt(nb / na);
    const double k2 = std::sqrt(na / nb);
    for (const auto& c : cells) {
        const double d = k1 * c.observed_a - k2 * c.observed_b;
        r.statistic += d * d / (c.observed_a + c.observed_b);
    }
    r.dof = static_cast<int>(cells.size()) - 1;
    r.p_value = chi2_survival(r.statistic, r.dof);
    return r;
}

namespace {

Chi2Result chi2_from_cells(const std::vector<Cell>& cells) {
    Chi2Result r;
    r.cells = cells.size();
    if (cells.size() < 2) {
        r.warning = "single cell after pooling; p-value set to 1";
        return r;
    }
    for (const auto& c : cells) {
        if (c.observed_b <= 0.0) {
            if (c.observed_a > 0.0) r.statistic = std::numeric_limits<double>::infinity();
            continue;
        }
        const double d = c.observed_a - c.observed_b;
        r.statistic += d * d / c.observed_b;
    }
    r.dof = static_cast<int>(cells.size()) - 1;
    r.p_value = std::isinf(r.statistic) ? 0.0 : chi2_survival(r.statistic, r.dof);
    return r;
}

// Observed cells plus `unseen` keys; the remaining expected mass forms one pooled cell.
Chi2Result goodness_of_fit(const EmpiricalPmf& observed, const std::vector<PmfKey>& unseen,
                           const std::function<double(const PmfKey&)>& probability,
                           double min_cell) {
    if (observed.empty()) throw std::invalid_argument("empty distribution");
    const double n = static_cast<double>(observed.total());
    std::vector<WeightedCell> weighted;
    double used = 0.0;
    for (const auto& [k, cnt] : observed.counts()) {
        const double e = n * probability(k);
        weighted.push_back({e, {static_cast<double>(cnt), e}, false});
        used += e;
    }
    for (const auto& k : unseen) {
        const double e = n * probability(k);
        weighted.push_back({e, {0.0, e}, false});
        used += e;
    }
    if (n - used > 0.0) weighted.push_back({n - used, {0.0, n - used}, true});
    return chi2_from_cells(pool_cells(std::move(weighted), min_cell));
}

}  // namespace

Chi2Result chi2_goodness_of_fit(const EmpiricalPmf& observed,
                                const std::function<double(const PmfKey&)>& probability,
                                double min_cell) {
    return goodness_of_fit(observed, {}, probability, min_cell);
}

Chi2Result chi2_goodness_of_fit(const EmpiricalPmf& observed, const ExactPmf& expected,
                                double min_cell) {
    const double n = static_cast<double>(observed.total());
    std::vector<PmfKey> unseen;
    for (const auto& [k, p] : expected)
        if (observed.count(k) == 0 && n * p >= min_cell) unseen.push_back(k);
    return goodness_of_fit(
        observed, unseen,
        [&expected](const PmfKey& k) {
            const auto it = expected.find(k);
            return it == expected.end() ? 0.0 : it->second;
        },
        min_cell);
}

MeanCI mean_ci(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("mean_ci needs at least two samples");
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    return {mean, 3.0 * se, se};
}

}  // namespace lpplab
