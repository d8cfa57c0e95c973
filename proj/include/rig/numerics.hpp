#ifndef RIG_NUMERICS_HPP
#define RIG_NUMERICS_HPP

#include <functional>
#include <vector>

namespace rig {

constexpr double kQuadratureRelTol = 1e-10;

// Adaptive Gauss-Kronrod quadrature on [a, b]; b may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = kQuadratureRelTol);

// Same, splitting at the given interior breakpoints (sorted or not).
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breaks, double rel_tol = kQuadratureRelTol);

// e^{-u} - 1 + u, accurate for small u.
double expm1_compensated(double u);

}  // namespace rig

#endif
