#include "lpplab/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "lpplab/lpp.hpp"

namespace lpplab {

namespace {

constexpr double kMapTol = 1e-12;

void require_s_domain(const ModelParams& p, double s) {
    if (!(s >= p.r_c() * (1.0 - kMapTol) && s * p.q() < 1.0))
        throw std::invalid_argument("s must lie in [r_c, 1/q)");
}

double phase_threshold(const ModelParams& p) {
    const double qr = p.q() * p.r_c();
    return qr / (1.0 - qr);
}

// pmf of Geo(alpha) on [0, kmax) with alpha^kmax <= tail.
std::vector<double> truncated_geometric(double alpha, double tail) {
    if (alpha == 0.0) return {1.0};
    const auto kmax = static_cast<std::size_t>(std::ceil(std::log(tail) / std::log(alpha)));
    std::vector<double> p(std::max<std::size_t>(kmax, 1));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = (1.0 - alpha) * std::pow(alpha, static_cast<double>(k));
    return p;
}

// Packs up to three prefix values and a queue length into 16-bit fields.
std::uint64_t pack(const std::array<std::int64_t, 3>& f, std::int64_t v) {
    for (auto x : f)
        if (x < 0 || x >= 65536) throw std::overflow_error("pmf oracle support too wide");
    if (v < 0 || v >= 65536) throw std::overflow_error("pmf oracle support too wide");
    return static_cast<std::uint64_t>(f[0]) | static_cast<std::uint64_t>(f[1]) << 16 |
           static_cast<std::uint64_t>(f[2]) << 32 | static_cast<std::uint64_t>(v) << 48;
}

std::array<std::int64_t, 3> unpack_prefix(std::uint64_t key) {
    return {static_cast<std::int64_t>(key & 0xffff), static_cast<std::int64_t>((key >> 16) & 0xffff),
            static_cast<std::int64_t>((key >> 32) & 0xffff)};
}

std::int64_t unpack_queue(std::uint64_t key) { return static_cast<std::int64_t>(key >> 48); }

}  // namespace

bool on_coexistence_line(const ModelParams& params, double s) {
    return params.c() >= 1.0 && std::abs(s - params.c()) <= kMapTol * params.c();
}

double slope_T(const ModelParams& params, double s) {
    require_s_domain(params, s);
    const double q = params.q();
    if (on_coexistence_line(params, s)) return q / (params.c() - q);
    return q * s / (1.0 - q * s);
}

double slope_T_inverse(const ModelParams& params, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("slope must be positive");
    return theta / (params.q() * (1.0 + theta));
}

double direction_X(const ModelParams& params, double theta) {
    const double t0 = phase_threshold(params);
    if (theta < t0 && std::abs(theta - t0) > kMapTol * std::max(1.0, t0)) return 1.0;
    const double q = params.q();
    const double r = q / (theta * (1.0 - q * q) - q * q);
    return r * r;
}

double direction_X_inverse(const ModelParams& params, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("direction must be positive");
    if (xi > params.xi_max() * (1.0 + kMapTol))
        throw std::invalid_argument("direction exceeds xi_max");
    const double q = params.q();
    const double r = std::sqrt(xi);
    return (q + q * q * r) / ((1.0 - q * q) * r);
}

SlopeMapEval evaluate_slope_maps(const ModelParams& params, double s) {
    SlopeMapEval e;
    e.s = s;
    e.theta = slope_T(params, s);
    e.xi = direction_X(params, e.theta);
    e.branch = on_coexistence_line(params, s) ? SlopeBranch::coexistence : SlopeBranch::generic;
    return e;
}

double busemann_parameter(const ModelParams& params, double xi) {
    return slope_T_inverse(params, direction_X_inverse(params, xi));
}

double shape_branch_point(const ModelParams& params) { return params.xi_max(); }

double shape_rho_fullspace(double q, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0,1]");
    return (q * q * (1.0 + kappa) + 2.0 * q * std::sqrt(kappa)) / (1.0 - q * q);
}

double shape_rho(const ModelParams& params, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0,1]");
    const double q = params.q();
    const double c = params.c();
    if (c <= 1.0 || kappa < shape_branch_point(params)) return shape_rho_fullspace(q, kappa);
    return q * (1.0 - q * c + c * c * kappa - q * c * kappa) / ((c - q) * (1.0 - c * q));
}

Interval maximizer_interval(const ModelParams& params, double theta) {
    const double x = direction_X(params, theta);
    const double t0 = phase_threshold(params);
    if (params.c() > 1.0 && std::abs(theta - t0) <= kMapTol * std::max(1.0, t0))
        return {0.0, 1.0 - x};
    return {1.0 - x, 1.0 - x};
}

MeasureSample sample_mu(const ModelParams& params, double s, int K, RandomStream& rng) {
    require_s_domain(params, s);
    if (K < 0) throw std::invalid_argument("K must be nonnegative");
    const double q = params.q();
    MeasureSample out{s, std::vector<std::int64_t>(static_cast<std::size_t>(K))};
    if (on_coexistence_line(params, s)) {
        const double alpha = q / params.c();
        std::int64_t f = 0;
        for (auto& v : out.values) v = f += rng.geometric(alpha);
        return out;
    }
    const std::int64_t y = rng.geometric(params.c() / s);
    std::int64_t s1 = 0;
    std::int64_t s2 = 0;
    std::int64_t running = std::numeric_limits<std::int64_t>::min();
    for (auto& v : out.values) {
        const std::int64_t a = rng.geometric(q * s);
        const std::int64_t b = rng.geometric(q / s);
        s1 += a;
        running = std::max(running, s1 - s2);  // S1(l) - S2(l-1)
        s2 += b;
        v = s2 + std::max<std::int64_t>(running - y, 0);
    }
    return out;
}

ExactPmf pmf_mu_prefix(const ModelParams& params, double s, int K, double tail_tol) {
    require_s_domain(params, s);
    if (K < 1 || K > 3) throw std::invalid_argument("pmf oracle supports 1 <= K <= 3");
    if (!(tail_tol > 0.0 && tail_tol <= 1e-10)) throw std::invalid_argument("tail_tol must be <= 1e-10");
    const double q = params.q();
    ExactPmf out;

    if (on_coexistence_line(params, s)) {
        const auto inc = truncated_geometric(q / params.c(), tail_tol / K);
        std::function<void(int, PmfKey&, double)> rec = [&](int k, PmfKey& key, double p) {
            if (k == K) {
                out[key] += p;
                return;
            }
            const std::int64_t prev = k == 0 ? 0 : key[static_cast<std::size_t>(k - 1)];
            for (std::size_t x = 0; x < inc.size(); ++x) {
                key.push_back(prev + static_cast<std::int64_t>(x));
                rec(k + 1, key, p * inc[x]);
                key.pop_back();
            }
        };
        PmfKey key;
        rec(0, key, 1.0);
        return out;
    }

    // Queue form of the defining map: with V_0 = Y,
    //   f(k) - f(k-1) = B_k + (A_k - V_{k-1})^+,  V_k = B_k + (V_{k-1} - A_k)^+.
    const double each = tail_tol / (2 * K + 1);
    const auto pa = truncated_geometric(q * s, each);
    const auto pb = truncated_geometric(q / s, each);
    const auto py = truncated_geometric(params.c() / s, each);

    std::unordered_map<std::uint64_t, double> states;
    for (std::size_t y = 0; y < py.size(); ++y) states[pack({0, 0, 0}, static_cast<std::int64_t>(y))] += py[y];

    std::unordered_map<std::int64_t, std::vector<double>> increment_law;
    const auto increment_given_queue = [&](std::int64_t v) -> const std::vector<double>& {
        auto it = increment_law.find(v);
        if (it != increment_law.end()) return it->second;
        std::vector<double> law(pa.size() + pb.size(), 0.0);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            const auto extra = static_cast<std::size_t>(std::max<std::int64_t>(static_cast<std::int64_t>(a) - v, 0));
            for (std::size_t b = 0; b < pb.size(); ++b) law[b + extra] += pa[a] * pb[b];
        }
        return increment_law.emplace(v, std::move(law)).first->second;
    };

    for (int k = 0; k < K; ++k) {
        std::unordered_map<std::uint64_t, double> next;
        next.reserve(states.size() * 8);
        const bool last = k == K - 1;
        for (const auto& [key, p] : states) {
            auto f = unpack_prefix(key);
            const std::int64_t v = unpack_queue(key);
            const std::int64_t prev = k == 0 ? 0 : f[static_cast<std::size_t>(k - 1)];
            if (last) {
                const auto& law = increment_given_queue(v);
                for (std::size_t x = 0; x < law.size(); ++x) {
                    if (law[x] == 0.0) continue;
                    f[static_cast<std::size_t>(k)] = prev + static_cast<std::int64_t>(x);
                    next[pack(f, 0)] += p * law[x];
                }
                continue;
            }
            for (std::size_t a = 0; a < pa.size(); ++a) {
                const auto ai = static_cast<std::int64_t>(a);
                for (std::size_t b = 0; b < pb.size(); ++b) {
                    const auto bi = static_cast<std::int64_t>(b);
                    f[static_cast<std::size_t>(k)] = prev + bi + std::max<std::int64_t>(ai - v, 0);
                    next[pack(f, bi + std::max<std::int64_t>(v - ai, 0))] += p * pa[a] * pb[b];
                }
            }
        }
        states = std::move(next);
    }
    for (const auto& [key, p] : states) {
        const auto f = unpack_prefix(key);
        out[PmfKey(f.begin(), f.begin() + K)] += p;
    }
    return out;
}

JointSample sample_joint(const ModelParams& params, const std::vector<double>& s_list, int K,
                         RandomStream& rng, double eps) {
    if (s_list.empty()) throw std::invalid_argument("parameter list is empty");
    if (K < 0) throw std::invalid_argument("K must be nonnegative");
    for (double s : s_list) require_s_domain(params, s);
    std::vector<double> distinct = s_list;
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const InhomogeneousField field(params, distinct, eps, rng());
    const Coord m = field.m();
    std::vector<std::vector<std::int64_t>> by_rank;
    for (Coord i = 1; i <= m; ++i) {
        const auto row = point_source_row(field, field.start_vertex(static_cast<int>(i)), 2 * m, 2 * m + K);
        std::vector<std::int64_t> f(static_cast<std::size_t>(K));
        for (int k = 1; k <= K; ++k) f[static_cast<std::size_t>(k - 1)] = row.at(2 * m + k) - row.at(2 * m);
        by_rank.push_back(std::move(f));
    }
    JointSample out{s_list, {}};
    for (double s : s_list) {
        const auto rank = std::find(distinct.begin(), distinct.end(), s) - distinct.begin();
        out.rows.push_back(by_rank[static_cast<std::size_t>(rank)]);
    }
    return out;
}

}  // namespace lpplab
