#include <rig/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace rig {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mu = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    double var = ss / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw std::invalid_argument("KS needs a nonempty sample");
    std::sort(a.begin(), a.end());
    double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double f = cdf(a[i]);
        d = std::max({d, std::fabs((i + 1) / n - f), std::fabs(f - i / n)});
    }
    return d;
}

double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double ks_pvalue_one_sample(double d, std::size_t n) {
    double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

double ks_pvalue_two_sample(double d, std::size_t n1, std::size_t n2) {
    double ne = static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
    double sn = std::sqrt(ne);
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

ChiSquareResult chi_square_homogeneity(std::vector<double> a, std::vector<double> b, double min_expected) {
    if (a.size() != b.size()) throw std::invalid_argument("histograms must share bins");
    double na = std::accumulate(a.begin(), a.end(), 0.0);
    double nb = std::accumulate(b.begin(), b.end(), 0.0);
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("histograms must be nonempty");
    // Pool bins from the right until every pooled bin has enough expected mass.
    std::vector<double> pa, pb;
    double ca = 0.0, cb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ca += a[k];
        cb += b[k];
        double tot = ca + cb;
        double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
        if (std::min(ea, eb) >= min_expected) {
            pa.push_back(ca);
            pb.push_back(cb);
            ca = cb = 0.0;
        }
    }
    if (ca + cb > 0.0) {
        if (pa.empty()) {
            pa.push_back(ca);
            pb.push_back(cb);
        } else {
            pa.back() += ca;
            pb.back() += cb;
        }
    }
    ChiSquareResult res;
    res.dof = static_cast<int>(pa.size()) - 1;
    if (res.dof <= 0) return res;
    for (std::size_t k = 0; k < pa.size(); ++k) {
        double tot = pa[k] + pb[k];
        double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
        res.statistic += (pa[k] - ea) * (pa[k] - ea) / ea + (pb[k] - eb) * (pb[k] - eb) / eb;
    }
    boost::math::chi_squared dist(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    return res;
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("bins must match");
    ChiSquareResult res;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        if (expected[k] <= 0.0) continue;
        res.statistic += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
        ++res.dof;
    }
    res.dof -= 1;
    if (res.dof <= 0) return res;
    boost::math::chi_squared dist(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    return res;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("distributions must share support");
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += std::fabs(p[k] - q[k]);
    return 0.5 * s;
}

}  // namespace rig
