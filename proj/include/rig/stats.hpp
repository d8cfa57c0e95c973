#ifndef RIG_STATS_HPP
#define RIG_STATS_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace rig {

double mean(const std::vector<double>& v);
double standard_error(const std::vector<double>& v);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// One-sample statistic against a continuous cdf.
double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);
// Asymptotic Kolmogorov tail P(K > x).
double kolmogorov_tail(double x);
double ks_pvalue_one_sample(double d, std::size_t n);
double ks_pvalue_two_sample(double d, std::size_t n1, std::size_t n2);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Homogeneity test for two histograms over the same bins. Bins with tiny
// expected counts are pooled into their neighbour before testing.
ChiSquareResult chi_square_homogeneity(std::vector<double> a, std::vector<double> b,
                                       double min_expected = 5.0);
// Goodness of fit of observed counts against expected counts.
ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace rig

#endif
