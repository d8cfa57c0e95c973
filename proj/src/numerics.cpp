#include <rig/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rig {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &err);
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breaks, double rel_tol) {
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    double lo = a;
    for (double c : breaks) {
        if (c <= lo || c >= b) continue;
        total += integrate(f, lo, c, rel_tol);
        lo = c;
    }
    total += integrate(f, lo, b, rel_tol);
    return total;
}

double expm1_compensated(double u) {
    if (std::fabs(u) < 1e-2) {
        // Taylor series of e^{-u} - 1 + u from the quadratic term on.
        double term = u * u / 2.0;
        double sum = term;
        for (int k = 3; k < 12; ++k) {
            term *= -u / k;
            sum += term;
        }
        return sum;
    }
    return std::expm1(-u) + u;
}

}  // namespace rig
