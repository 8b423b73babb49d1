#include "lpplab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lpplab {

namespace {

constexpr double kClamp = 1e-12;

std::size_t node_count(int n, std::int64_t k, std::int64_t ell) {
    return std::max<std::size_t>(4096, static_cast<std::size_t>(8 * (n + k + ell)));
}

double clamp_roundoff(double v) {
    if (v >= 0.0) return v;
    if (v > -kClamp) return 0.0;
    std::ostringstream os;
    os << "quadrature returned " << v << "; more nodes are needed";
    throw std::runtime_error(os.str());
}

// (1 + 4q/(1-q)^2 sin^2(t/2))^{-n}
double decay_factor(double theta, int n, double q) {
    const double s = std::sin(0.5 * theta);
    return std::exp(-n * std::log1p(4.0 * q / ((1.0 - q) * (1.0 - q)) * s * s));
}

void require_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
}

void require_c_below_one(double c) {
    if (!(c >= 0.0 && c < 1.0))
        throw std::invalid_argument("c must lie in [0,1); use reversed_geo_walk for c >= 1");
}

// Samples an index from unnormalised weights by inverse CDF.
std::size_t pick(const std::vector<double>& cumulative, double u) {
    const double target = u * cumulative.back();
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

bool interlaces(const Signature2& mu, const Signature2& lambda) {
    return lambda.lambda1 >= mu.lambda1 && mu.lambda1 >= lambda.lambda2 && lambda.lambda2 >= mu.lambda2;
}

double skew_schur_1var(const Signature2& lambda, const Signature2& mu, double x) {
    if (!interlaces(mu, lambda)) return 0.0;
    return std::pow(x, static_cast<double>(lambda.size() - mu.size()));
}

double u_exact(int n, std::int64_t k, std::int64_t ell, double q, int trunc) {
    require_q(q);
    if (n < 0 || n > 5) throw std::invalid_argument("u_exact supports 0 <= n <= 5");
    if (k < 0 || ell < 0) throw std::invalid_argument("gaps are nonnegative");
    if (trunc <= 0) trunc = static_cast<int>(std::ceil(std::log(1e-14) / std::log(q)));
    // weight[d]: total q^{|lambda|-|mu|} over chains reaching gap d.
    std::vector<double> weight(static_cast<std::size_t>(ell + 1), 0.0);
    weight[static_cast<std::size_t>(ell)] = 1.0;
    std::vector<double> qpow(static_cast<std::size_t>(2 * trunc + weight.size() + n * trunc + 2));
    for (std::size_t i = 0; i < qpow.size(); ++i) qpow[i] = std::pow(q, static_cast<double>(i));
    for (int step = 0; step < n; ++step) {
        std::vector<double> next(weight.size() + static_cast<std::size_t>(trunc), 0.0);
        for (std::size_t d = 0; d < weight.size(); ++d) {
            if (weight[d] == 0.0) continue;
            for (std::size_t b = 0; b <= d; ++b)
                for (std::size_t a = 0; a < static_cast<std::size_t>(trunc); ++a)
                    next[d + a - b] += weight[d] * qpow[a + b];
        }
        weight = std::move(next);
    }
    const double scale = std::pow(1.0 - q, 2.0 * n);
    return static_cast<std::size_t>(k) < weight.size() ? scale * weight[static_cast<std::size_t>(k)] : 0.0;
}

double u_quadrature(int n, std::int64_t k, std::int64_t ell, double q, std::size_t nodes) {
    require_q(q);
    if (n < 0 || k < 0 || ell < 0) throw std::invalid_argument("arguments are nonnegative");
    const std::size_t N = std::max(nodes, node_count(n, k, ell));
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(N);
        sum += std::sin(static_cast<double>(ell + 1) * t) * std::sin(static_cast<double>(k + 1) * t) *
               decay_factor(t, n, q);
    }
    return clamp_roundoff(2.0 * sum / static_cast<double>(N));
}

std::vector<double> u_quadrature_row(int n, std::int64_t k, std::int64_t ell_max, double q) {
    require_q(q);
    if (n < 0 || k < 0 || ell_max < 0) throw std::invalid_argument("arguments are nonnegative");
    const std::size_t N = node_count(n, k, ell_max);
    std::vector<double> sums(static_cast<std::size_t>(ell_max + 1), 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(N);
        const double common = std::sin(static_cast<double>(k + 1) * t) * decay_factor(t, n, q);
        for (std::size_t l = 0; l < sums.size(); ++l)
            sums[l] += std::sin(static_cast<double>(l + 1) * t) * common;
    }
    for (auto& s : sums) s = clamp_roundoff(2.0 * s / static_cast<double>(N));
    return sums;
}

double h_denominator(int n, std::int64_t k, double q, double c) {
    require_q(q);
    require_c_below_one(c);
    const std::size_t N = node_count(n, k, 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(N);
        const double kernel = std::sin(t) / (1.0 - 2.0 * c * std::cos(t) + c * c);
        sum += kernel * std::sin(static_cast<double>(k + 1) * t) * decay_factor(t, n, q);
    }
    const double v = clamp_roundoff(2.0 * sum / static_cast<double>(N));
    if (v <= 0.0) throw std::runtime_error("h normaliser vanished");
    return v;
}

double h_val(int x, int n, std::int64_t k, std::int64_t ell, double q, double c) {
    require_c_below_one(c);
    if (!(0 <= x && x <= n)) throw std::invalid_argument("need 0 <= x <= n");
    const double top = x == n ? (ell == k ? 1.0 : 0.0) : u_quadrature(n - x, k, ell, q);
    return top / h_denominator(n, k, q, c);
}

FiniteChain::FiniteChain(int n, std::int64_t k, double q, double c)
    : n_(n), k_(k), q_(q), c_(c) {
    require_q(q);
    require_c_below_one(c);
    if (n < 1 || k < 0) throw std::invalid_argument("need n >= 1 and k >= 0");
    gap_max_ = k + n + static_cast<std::int64_t>(std::ceil(std::log(1e-15) / std::log(q)));
    const double denom = h_denominator(n, k, q, c);
    const double scale = (1.0 - q) * (1.0 - q);
    const std::size_t width = static_cast<std::size_t>(gap_max_ + 1);
    std::vector<double> qpow(2 * width + 1);
    for (std::size_t i = 0; i < qpow.size(); ++i) qpow[i] = std::pow(q, static_cast<double>(i));
    // h(x, .) by the backward branching rule from h(n, .) = 1{k} / denom; sums of positive terms.
    h_.assign(static_cast<std::size_t>(n + 1), std::vector<double>(width, 0.0));
    h_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = 1.0 / denom;
    for (int x = n - 1; x >= 0; --x) {
        const auto& after = h_[static_cast<std::size_t>(x + 1)];
        auto& here = h_[static_cast<std::size_t>(x)];
        for (std::int64_t d = 0; d <= gap_max_; ++d) {
            double sum = 0.0;
            for (std::int64_t b = 0; b <= d; ++b)
                for (std::int64_t a = 0; d + a - b <= gap_max_; ++a)
                    sum += qpow[static_cast<std::size_t>(a + b)] * after[static_cast<std::size_t>(d + a - b)];
            here[static_cast<std::size_t>(d)] = scale * sum;
        }
    }

    initial_.resize(static_cast<std::size_t>(gap_max_ + 1));
    double mass = 0.0;
    for (std::int64_t d = 0; d <= gap_max_; ++d) {
        initial_[static_cast<std::size_t>(d)] = std::pow(c, static_cast<double>(d)) * h(0, d);
        mass += initial_[static_cast<std::size_t>(d)];
    }
    max_row_error_ = std::abs(mass - 1.0);

    rows_.assign(static_cast<std::size_t>(n), std::vector<std::vector<Move>>(width));
    for (int x = 0; x < n; ++x) {
        for (std::int64_t d = 0; d <= gap_max_; ++d) {
            const double from = h(x, d);
            if (from <= 0.0) continue;
            auto& moves = rows_[static_cast<std::size_t>(x)][static_cast<std::size_t>(d)];
            double total = 0.0;
            for (std::int64_t b = 0; b <= d; ++b) {
                for (std::int64_t a = 0; d + a - b <= gap_max_; ++a) {
                    const double to = h(x + 1, d + a - b);
                    if (to <= 0.0) continue;
                    total += scale * qpow[static_cast<std::size_t>(a + b)] * to / from;
                    moves.push_back({a, b, total});
                }
            }
            max_row_error_ = std::max(max_row_error_, std::abs(total - 1.0));
            for (auto& mv : moves) mv.p /= total;
        }
    }
}

double FiniteChain::h(int x, std::int64_t gap) const {
    if (gap < 0 || gap > gap_max_) return 0.0;
    return h_[static_cast<std::size_t>(x)][static_cast<std::size_t>(gap)];
}

const std::vector<FiniteChain::Move>& FiniteChain::row(int x, std::int64_t gap) const {
    static const std::vector<Move> empty;
    if (gap < 0 || gap > gap_max_) return empty;
    return rows_[static_cast<std::size_t>(x)][static_cast<std::size_t>(gap)];
}

double FiniteChain::initial_probability(std::int64_t gap) const {
    if (gap < 0 || gap > gap_max_) return 0.0;
    return initial_[static_cast<std::size_t>(gap)];
}

double FiniteChain::transition_probability(int x, const Signature2& mu, const Signature2& lambda) const {
    if (!(0 <= x && x < n_)) throw std::invalid_argument("time outside [0, n)");
    const double from = h(x, mu.gap());
    if (!interlaces(mu, lambda) || from <= 0.0) return 0.0;
    return (1.0 - q_) * (1.0 - q_) * skew_schur_1var(lambda, mu, q_) * h(x + 1, lambda.gap()) / from;
}

std::vector<Signature2> FiniteChain::sample(RandomStream& rng) const {
    std::vector<double> cumulative(initial_.size());
    double run = 0.0;
    for (std::size_t d = 0; d < initial_.size(); ++d) cumulative[d] = run += initial_[d];
    std::vector<Signature2> chain;
    chain.push_back({static_cast<std::int64_t>(pick(cumulative, rng.uniform())), 0});
    for (int x = 0; x < n_; ++x) {
        const Signature2 mu = chain.back();
        const auto& moves = row(x, mu.gap());
        if (moves.empty())
            throw std::runtime_error("finite chain reached a state with vanishing h; normalisation failed");
        const double u = rng.uniform();
        const auto it = std::lower_bound(moves.begin(), moves.end(), u,
                                         [](const Move& mv, double v) { return mv.p < v; });
        const Move& mv = it == moves.end() ? moves.back() : *it;
        chain.push_back({mu.lambda1 + mv.a, mu.lambda2 + mv.b});
    }
    return chain;
}

std::vector<ExactPmf> FiniteChain::exact_marginals() const {
    std::map<Signature2, double> law;
    double mass = 0.0;
    for (std::size_t d = 0; d < initial_.size(); ++d) mass += initial_[d];
    for (std::size_t d = 0; d < initial_.size(); ++d)
        if (initial_[d] > 0.0) law[{static_cast<std::int64_t>(d), 0}] = initial_[d] / mass;
    const auto as_pmf = [](const std::map<Signature2, double>& l) {
        ExactPmf out;
        for (const auto& [s, p] : l) out[{s.lambda1, s.lambda2}] += p;
        return out;
    };
    std::vector<ExactPmf> out{as_pmf(law)};
    for (int x = 0; x < n_; ++x) {
        std::map<Signature2, double> next;
        for (const auto& [mu, p] : law) {
            double prev = 0.0;
            for (const auto& mv : row(x, mu.gap())) {
                next[{mu.lambda1 + mv.a, mu.lambda2 + mv.b}] += p * (mv.p - prev);
                prev = mv.p;
            }
        }
        law = std::move(next);
        out.push_back(as_pmf(law));
    }
    return out;
}

std::vector<Signature2> finite_chain_sample(int n, std::int64_t k, double q, double c, RandomStream& rng) {
    return FiniteChain(n, k, q, c).sample(rng);
}

std::vector<Signature2> limit_chain_sample(int len, double q, double c, RandomStream& rng) {
    require_q(q);
    require_c_below_one(c);
    if (len < 0) throw std::invalid_argument("length must be nonnegative");
    // Initial gap: (1-c)^2 c^d (d+1).
    std::int64_t d0 = 0;
    {
        const double u = rng.uniform();
        double cum = 0.0;
        for (;; ++d0) {
            cum += (1.0 - c) * (1.0 - c) * std::pow(c, static_cast<double>(d0)) * static_cast<double>(d0 + 1);
            if (u <= cum || d0 > 100000) break;
        }
    }
    std::vector<Signature2> chain{{d0, 0}};
    const double g = 1.0 / (1.0 - q);
    for (int step = 0; step < len; ++step) {
        const Signature2 mu = chain.back();
        const std::int64_t d = mu.gap();
        // Weight of (a, b): q^{a+b} (d + a - b + 1). Marginal of b: q^b [D g + q g^2], D = d - b + 1.
        std::vector<double> cumulative(static_cast<std::size_t>(d + 1));
        double run = 0.0;
        for (std::int64_t b = 0; b <= d; ++b) {
            const double D = static_cast<double>(d - b + 1);
            cumulative[static_cast<std::size_t>(b)] = run += std::pow(q, static_cast<double>(b)) * (D * g + q * g * g);
        }
        const auto b = static_cast<std::int64_t>(pick(cumulative, rng.uniform()));
        const double D = static_cast<double>(d - b + 1);
        const double target = rng.uniform() * (D * g + q * g * g);
        double cum = 0.0;
        std::int64_t a = 0;
        for (;; ++a) {
            cum += std::pow(q, static_cast<double>(a)) * (D + static_cast<double>(a));
            if (target <= cum || a > 100000) break;
        }
        chain.push_back({mu.lambda1 + a, mu.lambda2 + b});
    }
    return chain;
}

AuxChain aux_chain_sample(int len, double q, double c, RandomStream& rng) {
    require_q(q);
    require_c_below_one(c);
    if (len < 0) throw std::invalid_argument("length must be nonnegative");
    AuxChain out;
    out.u = rng.geometric(c);
    out.y = rng.geometric(c);
    out.lambda.push_back({out.u + out.y, 0});
    out.queue.push_back(out.y);
    for (int step = 0; step < len; ++step) {
        const std::int64_t a = rng.geometric(q);
        const std::int64_t b = rng.geometric(q);
        const std::int64_t v = out.queue.back();
        const Signature2 mu = out.lambda.back();
        out.lambda.push_back({mu.lambda1 + b + std::max<std::int64_t>(a - v, 0), mu.lambda2 + std::min(a, v)});
        out.queue.push_back(b + std::max<std::int64_t>(v - a, 0));
        out.a.push_back(a);
        out.b.push_back(b);
    }
    return out;
}

bool aux_identity_holds(const AuxChain& chain) {
    std::int64_t s1 = 0;
    std::int64_t s2 = 0;
    std::int64_t running = std::numeric_limits<std::int64_t>::min();
    if (chain.queue.empty() || chain.queue[0] != chain.y) return false;
    for (std::size_t k = 0; k < chain.a.size(); ++k) {
        s1 += chain.a[k];
        running = std::max(running, s1 - s2);
        s2 += chain.b[k];
        const std::int64_t r = std::max<std::int64_t>(running - chain.y, 0);
        if (chain.queue[k + 1] != chain.y + s2 - s1 + r) return false;
    }
    return true;
}

GibbsLaw::GibbsLaw(int m, std::int64_t y1, std::int64_t y2, double q, double c, std::int64_t depth)
    : m_(m), y1_(y1), y2_(y2), q_(q), c_(c), depth_(depth) {
    require_q(q);
    if (m < 1 || m > 6) throw std::invalid_argument("Gibbs law supports 1 <= m <= 6");
    if (y1 < y2) throw std::invalid_argument("need y1 >= y2");
    if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
    if (!(c >= 0.0 && c * q < 1.0)) throw std::invalid_argument("c must lie in [0, 1/q)");
    lo_ = y2 - depth;
    width_ = y1 - lo_ + 1;
    const std::size_t cells = static_cast<std::size_t>(width_ * width_);
    to_end_.assign(static_cast<std::size_t>(m + 1), std::vector<double>(cells, 0.0));
    to_end_[static_cast<std::size_t>(m)][cell(y1, y2)] = 1.0;
    for (int t = m - 1; t >= 0; --t) {
        const auto& after = to_end_[static_cast<std::size_t>(t + 1)];
        // suffix[l1][l2] = sum over l1' >= l1, l2' >= l2 of after.
        std::vector<double> suffix(static_cast<std::size_t>((width_ + 1) * (width_ + 1)), 0.0);
        const auto sidx = [this](std::int64_t a, std::int64_t b) {
            return static_cast<std::size_t>((a - lo_) * (width_ + 1) + (b - lo_));
        };
        for (std::int64_t a = y1; a >= lo_; --a)
            for (std::int64_t b = y1; b >= lo_; --b)
                suffix[sidx(a, b)] = after[cell(a, b)] + suffix[sidx(a + 1, b)] + suffix[sidx(a, b + 1)] -
                                     suffix[sidx(a + 1, b + 1)];
        auto& now = to_end_[static_cast<std::size_t>(t)];
        for (std::int64_t mu1 = lo_; mu1 <= y1; ++mu1)
            for (std::int64_t mu2 = lo_; mu2 <= std::min(mu1, y2); ++mu2)
                now[cell(mu1, mu2)] = suffix[sidx(mu1, mu2)] - suffix[sidx(mu1, mu1 + 1)];
    }
    for (std::int64_t l1 = lo_; l1 <= y1; ++l1)
        for (std::int64_t l2 = lo_; l2 <= std::min(l1, y2); ++l2)
            z_ += start_weight(l1, l2) * to_end_[0][cell(l1, l2)];
}

std::size_t GibbsLaw::cell(std::int64_t l1, std::int64_t l2) const {
    return static_cast<std::size_t>((l1 - lo_) * width_ + (l2 - lo_));
}

double GibbsLaw::start_weight(std::int64_t l1, std::int64_t l2) const {
    return std::pow(c_, static_cast<double>(l1 - l2)) * std::pow(q_, static_cast<double>(y1_ + y2_ - l1 - l2));
}

bool GibbsLaw::in_support(const TwoLayerPath& path) const {
    if (path.m() != m_ || path.lower.size() != path.upper.size()) return false;
    if (path.upper.back() != y1_ || path.lower.back() != y2_) return false;
    if (path.lower.front() < lo_) return false;
    for (int t = 0; t < m_; ++t)
        if (!interlaces(path.at(t), path.at(t + 1))) return false;
    return true;
}

double GibbsLaw::probability(const TwoLayerPath& path) const {
    if (!in_support(path)) return 0.0;
    return start_weight(path.upper.front(), path.lower.front()) / z_;
}

std::vector<double> GibbsLaw::forward(std::vector<double> f) const {
    // prefix[l1][l2] = sum over l1' <= l1, l2' <= l2 of f; new(l) = prefix(l1,l2) - prefix(l2-1,l2).
    const auto pidx = [this](std::int64_t a, std::int64_t b) {
        return static_cast<std::size_t>((a - lo_ + 1) * (width_ + 1) + (b - lo_ + 1));
    };
    std::vector<double> prefix(static_cast<std::size_t>((width_ + 1) * (width_ + 1)), 0.0);
    for (std::int64_t a = lo_; a <= y1_; ++a)
        for (std::int64_t b = lo_; b <= y1_; ++b)
            prefix[pidx(a, b)] = f[cell(a, b)] + prefix[pidx(a - 1, b)] + prefix[pidx(a, b - 1)] -
                                 prefix[pidx(a - 1, b - 1)];
    std::vector<double> out(f.size(), 0.0);
    for (std::int64_t l1 = lo_; l1 <= y1_; ++l1)
        for (std::int64_t l2 = lo_; l2 <= std::min(l1, y2_); ++l2)
            out[cell(l1, l2)] = prefix[pidx(l1, l2)] - prefix[pidx(l2 - 1, l2)];
    return out;
}

std::vector<ExactPmf> GibbsLaw::recentered_marginals() const {
    std::vector<ExactPmf> out(static_cast<std::size_t>(m_ + 1));
    for (std::int64_t t0 = lo_; t0 <= y2_; ++t0) {
        std::vector<double> f(static_cast<std::size_t>(width_ * width_), 0.0);
        for (std::int64_t l1 = t0; l1 <= y1_; ++l1) f[cell(l1, t0)] = start_weight(l1, t0);
        for (int t = 0; t <= m_; ++t) {
            if (t > 0) f = forward(std::move(f));
            const auto& back = to_end_[static_cast<std::size_t>(t)];
            for (std::int64_t l1 = lo_; l1 <= y1_; ++l1)
                for (std::int64_t l2 = lo_; l2 <= std::min(l1, y2_); ++l2) {
                    const double p = f[cell(l1, l2)] * back[cell(l1, l2)] / z_;
                    if (p > 0.0) out[static_cast<std::size_t>(t)][{l1 - t0, l2 - t0}] += p;
                }
        }
    }
    return out;
}

std::vector<std::pair<TwoLayerPath, double>> GibbsLaw::enumerate(std::size_t limit) const {
    std::vector<std::pair<TwoLayerPath, double>> out;
    TwoLayerPath path;
    path.upper.assign(static_cast<std::size_t>(m_ + 1), 0);
    path.lower.assign(static_cast<std::size_t>(m_ + 1), 0);
    path.upper.back() = y1_;
    path.lower.back() = y2_;
    const auto rec = [&](auto&& self, int t) -> void {
        if (t < 0) {
            if (out.size() >= limit) throw std::length_error("Gibbs path count exceeds enumeration limit");
            out.push_back({path, probability(path)});
            return;
        }
        const Signature2 lam = path.at(t + 1);
        for (std::int64_t mu1 = lam.lambda2; mu1 <= lam.lambda1; ++mu1)
            for (std::int64_t mu2 = lo_; mu2 <= lam.lambda2; ++mu2) {
                path.upper[static_cast<std::size_t>(t)] = mu1;
                path.lower[static_cast<std::size_t>(t)] = mu2;
                self(self, t - 1);
            }
    };
    rec(rec, m_ - 1);
    return out;
}

GibbsLaw gibbs_enumerate(int m, std::int64_t y1, std::int64_t y2, double q, double c, std::int64_t depth) {
    GibbsLaw law(m, y1, y2, q, c, depth);
    const GibbsLaw doubled(m, y1, y2, q, c, 2 * depth);
    const double rel = std::abs(doubled.normalizer() - law.normalizer()) / doubled.normalizer();
    if (!(rel <= 1e-12)) {
        std::ostringstream os;
        os << "Gibbs normaliser unstable at depth " << depth << " (relative change " << rel
           << " on doubling); try depth >= " << 2 * depth;
        throw std::runtime_error(os.str());
    }
    return law;
}

std::vector<std::int64_t> reversed_geo_walk(int m, std::int64_t y, double p, RandomStream& rng) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (m < 0) throw std::invalid_argument("m must be nonnegative");
    std::vector<std::int64_t> path(static_cast<std::size_t>(m + 1));
    path[static_cast<std::size_t>(m)] = y;
    for (int j = m; j >= 1; --j)
        path[static_cast<std::size_t>(j - 1)] = path[static_cast<std::size_t>(j)] - rng.geometric(p);
    return path;
}

double c_of_h(double h, double q) {
    require_q(q);
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    const double r = 1.0 - q;
    return h * r * r * r / (2.0 * std::sqrt(std::numbers::pi) * std::pow(q, 1.5)) *
           std::exp(-h * h * r * r / (4.0 * q));
}

double c_of_h_quadrature(double h, double q) {
    require_q(q);
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    // (2/pi) * int_0^inf a sin(h a) exp(-beta a^2) da by composite Simpson on [0, A].
    const double beta = q / ((1.0 - q) * (1.0 - q));
    const double upper = std::sqrt(60.0 / beta);
    const int panels = 40000;
    const double step = upper / panels;
    const auto f = [&](double a) { return a * std::sin(h * a) * std::exp(-beta * a * a); };
    double sum = f(0.0) + f(upper);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * step);
    return 2.0 / std::numbers::pi * sum * step / 3.0;
}

}  // namespace lpplab
