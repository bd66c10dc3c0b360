#pragma once

#include <cmath>
#include <functional>

namespace flutter::numerics {

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Adaptive Simpson quadrature of f over [a, b].
///
/// Subdivides until the Richardson error estimate of every panel is below its
/// share of abs_tol, or max_depth is reached. Integrands here are smooth on
/// short intervals, so the depth cap is rarely hit.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-14, int max_depth = 48);

/// Adaptive Simpson with the absolute tolerance scaled by the magnitude of a
/// coarse estimate of the integral (rel * |estimate|).
double integrate_scaled(const std::function<double(double)>& f, double a, double b,
                        double rel = 1e-14);

/// Bracketed root finder: bisection refined by a safeguarded secant step.
///
/// Requires f(a) and f(b) of opposite sign (throws BracketFailure otherwise).
/// Stops when the bracket width is below rel_tol * |midpoint|.
double find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12, int max_iter = 500);

/// Arithmetic-geometric mean of a, b > 0.
double agm(double a, double b);

/// Complete elliptic integral of the first kind K(m) with parameter m = k^2,
/// 0 <= m < 1.
double elliptic_k(double m);

/// cosh(a)/cosh(b) without overflow for large arguments.
double cosh_ratio(double a, double b);

/// sinh(a)/sinh(b) without overflow for large arguments; b != 0.
double sinh_ratio(double a, double b);

}  // namespace flutter::numerics
