#include "flutter/numerics.hpp"

#include "flutter/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flutter::numerics {

namespace {

double simpson_panel(const std::function<double(double)>& f, double a, double fa, double m,
                     double fm, double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_panel(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_panel(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_panel(f, a, fa, m, fm, b, fb, whole, abs_tol, max_depth);
}

double integrate_scaled(const std::function<double(double)>& f, double a, double b, double rel) {
    // Composite Simpson on 32 panels gives the magnitude used to scale the tolerance.
    constexpr int n = 32;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    const double rough = std::abs(s * h / 3.0);
    const double scale = rough > 0.0 ? rough : std::numeric_limits<double>::min();
    return adaptive_simpson(f, a, b, rel * scale);
}

double find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, int max_iter) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb) || std::isnan(fa) || std::isnan(fb)) {
        std::ostringstream msg;
        msg << "no sign change on [" << a << ", " << b << "]: f(a)=" << fa << ", f(b)=" << fb;
        throw BracketFailure(msg.str());
    }
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    for (int it = 0; it < max_iter; ++it) {
        const double width = b - a;
        const double mid = 0.5 * (a + b);
        if (width <= rel_tol * std::abs(mid)) return mid;

        // Secant through the bracket ends, accepted only if it lands well
        // inside the bracket; otherwise bisect.
        double x = mid;
        if (std::isfinite(fa) && std::isfinite(fb)) {
            const double s = b - fb * (b - a) / (fb - fa);
            const double margin = 0.05 * width;
            if (std::isfinite(s) && s > a + margin && s < b - margin) x = s;
        }
        double fx = f(x);
        if (fx == 0.0) return x;
        if (std::signbit(fx) == std::signbit(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // A secant step that barely moved one end is followed by a bisection
        // so the bracket shrinks geometrically.
        if (x != mid && (b - a) > 0.5 * width) {
            const double m2 = 0.5 * (a + b);
            const double fm2 = f(m2);
            if (fm2 == 0.0) return m2;
            if (std::signbit(fm2) == std::signbit(fa)) {
                a = m2;
                fa = fm2;
            } else {
                b = m2;
                fb = fm2;
            }
        }
    }
    throw BracketFailure("root finder did not converge within the iteration budget");
}

double agm(double a, double b) {
    for (int it = 0; it < 64; ++it) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        if (std::abs(an - bn) <= 4.0 * std::numeric_limits<double>::epsilon() * an) return an;
        a = an;
        b = bn;
    }
    return 0.5 * (a + b);
}

double elliptic_k(double m) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic_k: parameter must lie in [0, 1)");
    return pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

double cosh_ratio(double a, double b) {
    a = std::abs(a);
    b = std::abs(b);
    // cosh(a)/cosh(b) = e^{a-b} (1 + e^{-2a}) / (1 + e^{-2b})
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

double sinh_ratio(double a, double b) {
    const double sa = a < 0.0 ? -1.0 : 1.0;
    const double sb = b < 0.0 ? -1.0 : 1.0;
    a = std::abs(a);
    b = std::abs(b);
    if (b == 0.0) throw DomainError("sinh_ratio: zero denominator");
    // sinh(a)/sinh(b) = e^{a-b} (1 - e^{-2a}) / (1 - e^{-2b}), expm1 keeps small arguments exact
    return sa * sb * std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

}  // namespace flutter::numerics
