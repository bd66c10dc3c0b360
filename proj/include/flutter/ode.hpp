#pragma once

// Embedded Dormand–Prince 5(4) integrator with adaptive step size and the
// standard fourth-order continuous extension. State dimension is a template
// parameter so the hot loops work on std::array without allocation.

#include "flutter/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <type_traits>

namespace flutter::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 selects a step automatically
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 20'000'000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    bool stopped_early = false;
    double t_final = 0.0;
};

/// Interpolant over one accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    Vec<N> r1{}, r2{}, r3{}, r4{}, r5{};

    double t1() const { return t0 + h; }

    double component(std::size_t i, double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        return r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
    }

    Vec<N> operator()(double t) const {
        Vec<N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = component(i, t);
        return out;
    }
};

/// Sample times t0 + i*dt, i >= 1, up to t1. Times are computed from the index
/// so no rounding accumulates, and a grid point within 1e-9*dt of t1 is t1.
class OutputGrid {
public:
    OutputGrid(double t0, double dt, double t1) : t0_(t0), dt_(dt), t1_(t1) {}

    /// Next grid time not yet emitted if it is reached by t, else nothing.
    bool due(double t) const {
        const double tn = next();
        return tn <= t1_ && tn <= t + 1e-9 * dt_;
    }
    double next() const {
        const double tn = t0_ + double(index_) * dt_;
        return std::abs(tn - t1_) <= 1e-9 * dt_ ? t1_ : tn;
    }
    void advance() { ++index_; }

private:
    double t0_, dt_, t1_;
    long index_ = 1;
};

namespace detail {

// Butcher tableau of Dormand & Prince (1980).
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer, Nørsett & Wanner, DOPRI5).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class Observer, std::size_t N>
bool notify(Observer& obs, const DenseStep<N>& seg, double t, const Vec<N>& y) {
    if constexpr (std::is_same_v<std::invoke_result_t<Observer&, const DenseStep<N>&, double,
                                                      const Vec<N>&>,
                                 bool>) {
        return obs(seg, t, y);
    } else {
        obs(seg, t, y);
        return true;
    }
}

}  // namespace detail

/// Observer that ignores every step.
struct NoObserver {
    template <std::size_t N>
    void operator()(const DenseStep<N>&, double, const Vec<N>&) const {}
};

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0), overwriting y with the
/// final state.
///
/// f has signature void(double t, const Vec<N>& y, Vec<N>& dydt). After every
/// accepted step the observer receives the step interpolant and the new
/// (t, y); returning false from it stops the integration early.
template <std::size_t N, class Rhs, class Observer = NoObserver>
Stats integrate(Rhs&& f, double t0, Vec<N>& y, double t1, const Options& opt,
                Observer&& obs = {}) {
    using namespace detail;
    Stats stats;
    stats.t_final = t0;
    if (!(t1 > t0)) {
        if (t1 == t0) return stats;
        throw IntegrationError("ode::integrate requires t1 >= t0");
    }

    auto scale = [&](double a, double b) {
        return opt.atol + opt.rtol * std::max(std::abs(a), std::abs(b));
    };

    Vec<N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    f(t0, y, k1);
    ++stats.rhs_evals;

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic.
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = scale(y[i], y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1n += (k1[i] / sk) * (k1[i] / sk);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, t1 - t0);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h0 * k1[i];
        f(t0 + h0, tmp, k2);
        ++stats.rhs_evals;
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = scale(y[i], y[i]);
            const double v = (k2[i] - k1[i]) / sk;
            d2 += v * v;
        }
        d2 = std::sqrt(d2 / N) / h0;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min(100.0 * h0, h1);
    }
    h = std::min({h, opt.max_step, t1 - t0});

    double t = t0;
    double err_old = 1e-4;
    bool last_rejected = false;
    DenseStep<N> seg;

    while (t < t1) {
        if (stats.accepted + stats.rejected >= opt.max_steps) {
            throw IntegrationError("ode::integrate: step budget exhausted");
        }
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
            std::ostringstream msg;
            msg << "ode::integrate: step size underflow at t=" << t;
            throw IntegrationError(msg.str());
        }

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] +
                     h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double tph = final_step ? t1 : t + h;
        f(tph, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] +
                      h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(tph, ynew, k7);
        stats.rhs_evals += 6;

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double v = ei / scale(y[i], ynew[i]);
            err += v * v;
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) {
            h *= 0.1;
            ++stats.rejected;
            last_rejected = true;
            continue;
        }

        if (err <= 1.0) {
            seg.t0 = t;
            seg.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                seg.r1[i] = y[i];
                seg.r2[i] = ynew[i] - y[i];
                seg.r3[i] = h * k1[i] - seg.r2[i];
                seg.r4[i] = seg.r2[i] - h * k7[i] - seg.r3[i];
                seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                 d7 * k7[i]);
            }
            t = tph;
            y = ynew;
            k1 = k7;
            ++stats.accepted;
            stats.t_final = t;
            if (!notify(obs, seg, t, y)) {
                stats.stopped_early = true;
                return stats;
            }
            // PI controller.
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) * std::pow(err_old, 0.04);
            fac = std::clamp(fac, 0.2, 10.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            err_old = std::max(err, 1e-4);
            h = std::min(h * fac, opt.max_step);
            last_rejected = false;
        } else {
            const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= fac;
            ++stats.rejected;
            last_rejected = true;
        }
    }
    stats.t_final = t;
    return stats;
}

}  // namespace flutter::ode
