#pragma once

#include <functional>
#include <span>

namespace archmix {

// Adaptive Gauss-Kronrod integration on [a,b], absolute tolerance abs_tol.
// Throws QuadratureError if the error estimate does not reach the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

// Same, but the interval is split at the given interior knots first. TV
// integrands are piecewise smooth with kinks at density edges and sign
// crossings; splitting there keeps the adaptive rule cheap.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> knots, double abs_tol = 1e-9);

// Integrates f over [0,b] when f(y) ~ c*y^{-1/2} near 0 (chi-square(1) scale
// families): the leading piece is mapped through y = u^2, which removes the
// singularity, and the remainder is handled by the plain adaptive rule.
double integrate_sqrt_singular(const std::function<double(double)>& f, double b,
                               double abs_tol = 1e-9);

}  // namespace archmix
