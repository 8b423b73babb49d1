#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace lpplab {

using PmfKey = std::vector<std::int64_t>;
using ExactPmf = std::map<PmfKey, double>;

// Counts over integer tuples, kept in sorted order so reductions are deterministic.
class EmpiricalPmf {
public:
    void add(const PmfKey& key, std::uint64_t count = 1);
    void add(std::int64_t value, std::uint64_t count = 1) { add(PmfKey{value}, count); }
    void merge(const EmpiricalPmf& other);

    std::uint64_t total() const { return total_; }
    bool empty() const { return total_ == 0; }
    const std::map<PmfKey, std::uint64_t>& counts() const { return counts_; }
    std::uint64_t count(const PmfKey& key) const;
    double probability(const PmfKey& key) const;

    // Law of coordinate `coord` as a one-dimensional pmf.
    EmpiricalPmf marginal(std::size_t coord) const;
    std::size_t dimension() const;

private:
    std::map<PmfKey, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

ExactPmf marginal(const ExactPmf& pmf, std::size_t coord);
double total_mass(const ExactPmf& pmf);

double tv_distance(const EmpiricalPmf& a, const EmpiricalPmf& b);
double tv_distance(const EmpiricalPmf& a, const ExactPmf& b);
double tv_distance(const ExactPmf& a, const ExactPmf& b);

// Largest total-variation distance between coordinate marginals.
double max_marginal_tv(const EmpiricalPmf& a, const EmpiricalPmf& b);
double max_marginal_tv(const EmpiricalPmf& a, const ExactPmf& b);

struct Chi2Result {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t cells = 0;
    std::string warning;
};

// Two-sample chi-square on a shared support; cells whose expected count in either sample
// falls below min_cell are pooled.
Chi2Result chi2_two_sample(const EmpiricalPmf& a, const EmpiricalPmf& b, double min_cell = 5.0);

// Goodness of fit against exact probabilities; unobserved support carries into a pooled cell.
Chi2Result chi2_goodness_of_fit(const EmpiricalPmf& observed, const ExactPmf& expected,
                                double min_cell = 5.0);
Chi2Result chi2_goodness_of_fit(const EmpiricalPmf& observed,
                                const std::function<double(const PmfKey&)>& probability,
                                double min_cell = 5.0);

struct MeanCI {
    double mean = 0.0;
    double halfwidth = 0.0;  // three standard errors
    double std_error = 0.0;
};

MeanCI mean_ci(const std::vector<double>& samples);

// Upper regularised incomplete gamma Q(dof/2, x/2).
double chi2_survival(double statistic, int dof);

}  // namespace lpplab
