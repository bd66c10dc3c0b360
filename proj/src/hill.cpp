#include "flutter/hill.hpp"

#include "flutter/errors.hpp"
#include "flutter/format.hpp"
#include "flutter/numerics.hpp"
#include "flutter/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace flutter {

using numerics::pi;

namespace {

void check_indices(int k, int l) {
    if (k < 1 || k > kLong) throw DomainError("hill: k must be 1..14");
    if (l < 1 || l > kTors) throw DomainError("hill: l must be 1..2");
}

ode::Options to_options(const IntegratorSettings& s) {
    ode::Options o;
    o.rtol = s.rtol;
    o.atol = s.atol;
    return o;
}

// State: phi, phi', x1, x1', x2, x2', int sqrt(A).
using HillState = ode::Vec<7>;

struct HillRhs {
    double rho, b, delta, d;
    void operator()(double, const HillState& y, HillState& dy) const {
        const double p2 = y[0] * y[0];
        const double a = delta + d * p2;
        dy[0] = y[1];
        dy[1] = -rho * y[0] - b * p2 * y[0];
        dy[2] = y[3];
        dy[3] = -a * y[2];
        dy[4] = y[5];
        dy[5] = -a * y[4];
        dy[6] = std::sqrt(a);
    }
};

}  // namespace

HillProblem make_hill_problem_energy(const ModalCoefficients& c, int k, int l, double E) {
    check_indices(k, l);
    if (E < 0.0) throw DomainError("hill: energy must be non-negative");
    return HillProblem{k, l, c.delta_l(l), c.d_lk(l, k), make_orbit(E, c.rho_k(k), c.b_k(k))};
}

HillProblem make_hill_problem(const ModalCoefficients& c, int k, int l, double A) {
    check_indices(k, l);
    if (A < 0.0) throw DomainError("hill: amplitude must be non-negative");
    const double E = energy_of(A, 0.0, c.rho_k(k), c.b_k(k));
    HillProblem p = make_hill_problem_energy(c, k, l, E);
    // Keep the launch amplitude exact rather than its round trip through E.
    p.orbit.amplitude = A;
    return p;
}

Monodromy monodromy(const HillProblem& p, const IntegratorSettings& s) {
    Monodromy out;
    const double tau = p.coefficient_period();
    if (p.orbit.E == 0.0) {
        const double w = std::sqrt(p.delta);
        const double c = std::cos(w * tau), sn = std::sin(w * tau);
        out.M = {{{c, sn / w}, {-w * sn, c}}};
        out.sqrt_coefficient_integral = w * tau;
    } else {
        HillState y{p.amplitude(), 0.0, 1.0, 0.0, 0.0, 1.0, 0.0};
        HillRhs rhs{p.orbit.rho, p.orbit.b, p.delta, p.d};
        ode::integrate<7>(rhs, 0.0, y, tau, to_options(s));
        out.M = {{{y[2], y[4]}, {y[3], y[5]}}};
        out.sqrt_coefficient_integral = y[6];
    }
    out.trace = out.M[0][0] + out.M[1][1];
    out.det = out.M[0][0] * out.M[1][1] - out.M[0][1] * out.M[1][0];
    return out;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "?";
}

Stability classify_trace(double trace, double tol) {
    const double a = std::abs(trace);
    if (a < 2.0 - tol) return Stability::Stable;
    if (a > 2.0 + tol) return Stability::Unstable;
    return Stability::Marginal;
}

double growth_exponent(double trace) {
    const double a = std::abs(trace);
    if (a <= 2.0) return 0.0;
    return std::log(0.5 * (a + std::sqrt(a * a - 4.0)));
}

ResonanceFlags resonance_flags(int k, int l, const ModalCoefficients& c) {
    check_indices(k, l);
    ResonanceFlags f;
    f.ratio = std::sqrt(c.delta_l(l) / c.rho_k(k));
    f.m_below = std::max(0, int(std::ceil(f.ratio)) - 1);
    const double nearest = std::round(f.ratio);
    f.near_integer = nearest >= 1.0 && std::abs(f.ratio - nearest) < 1e-9;
    if (f.near_integer) {
        f.resonant_m = int(nearest) - 1;
        const double m1 = f.resonant_m + 1.0;
        f.strange3 = 2.0 * (2.0 + m1 * pi) * c.d_lk(l, k) < 3.0 * pi * m1 * m1 * m1 * c.b_k(k);
    }
    return f;
}

bool zhukovskii_check(const HillProblem& p) {
    const double T = p.orbit.period;
    const double T2 = T * T;
    const double lam = p.amplitude() * p.amplitude();
    const double ratio = std::sqrt(p.delta / p.orbit.rho);
    const int m0 = std::max(0, int(std::ceil(ratio)) - 1);
    for (int m = std::max(0, m0 - 1); m <= m0 + 1; ++m) {
        const double lo = 4.0 * m * m * pi * pi / p.delta;
        const double hi = 4.0 * (m + 1.0) * (m + 1.0) * pi * pi / (p.delta + p.d * lam);
        if (lo <= T2 && T2 <= hi) return true;
    }
    return false;
}

BurdinaResult burdina_check(const HillProblem& p, const Monodromy* mon,
                            const IntegratorSettings& s) {
    BurdinaResult r;
    if (mon != nullptr) {
        r.integral = mon->sqrt_coefficient_integral;
    } else {
        r.integral = monodromy(p, s).sqrt_coefficient_integral;
    }
    r.log_term = 0.5 * std::log(p.coefficient_max() / p.coefficient_min());
    const double lo = r.integral - r.log_term;
    if (lo < 0.0) return r;
    const double m = std::floor(lo / pi);
    r.pass = r.integral + r.log_term <= (m + 1.0) * pi;
    return r;
}

StabilityVerdict assess(const HillProblem& p, const ModalCoefficients& c,
                        const IntegratorSettings& s) {
    StabilityVerdict v;
    const Monodromy mon = monodromy(p, s);
    v.monodromy_trace = mon.trace;
    v.status = classify_trace(mon.trace);
    v.growth_exponent = growth_exponent(mon.trace);
    v.zhukovskii = zhukovskii_check(p);
    v.burdina = burdina_check(p, &mon).pass;
    v.flags = resonance_flags(p.k, p.l, c);
    return v;
}

GrowthResult growth_simulation(const HillProblem& p, double t_end, const IntegratorSettings& s,
                               double output_dt) {
    if (!(t_end > 0.0)) throw DomainError("growth_simulation: t_end must be positive");
    GrowthResult g;
    HillState y{p.amplitude(), 0.0, 1.0, 1.0, 0.0, 0.0, 0.0};
    HillRhs rhs{p.orbit.rho, p.orbit.b, p.delta, p.d};
    g.max_abs_xi = 1.0;
    g.samples.push_back({0.0, 1.0});
    ode::OutputGrid grid(0.0, output_dt, t_end);
    auto observer = [&](const ode::DenseStep<7>& seg, double t, const HillState& st) {
        // The interpolant catches extrema of xi between accepted steps.
        for (int i = 1; i <= 4; ++i) {
            const double ti = seg.t0 + seg.h * i / 4.0;
            g.max_abs_xi = std::max(g.max_abs_xi, std::abs(seg.component(2, ti)));
        }
        if (output_dt > 0.0) {
            for (; grid.due(t); grid.advance()) {
                g.samples.push_back({grid.next(), seg.component(2, std::min(grid.next(), t))});
            }
        } else {
            g.samples.push_back({t, st[2]});
        }
    };
    ode::integrate<7>(rhs, 0.0, y, t_end, to_options(s), observer);
    return g;
}

std::vector<UnstableInterval> unstable_intervals(const std::vector<ScanPoint>& trace) {
    std::vector<UnstableInterval> out;
    std::size_t i = 0;
    while (i < trace.size()) {
        if (trace[i].status != Stability::Unstable) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < trace.size() && trace[j + 1].status == Stability::Unstable) ++j;
        out.push_back({trace[i].A, trace[j].A});
        i = j + 1;
    }
    return out;
}

ThresholdResult threshold_scan(int k, int l, const ModalCoefficients& c, const ScanOptions& opt) {
    check_indices(k, l);
    if (!(opt.grid_step > 0.0)) throw DomainError("threshold_scan: grid_step must be positive");
    if (!(opt.A_max > 0.0)) throw DomainError("threshold_scan: A_max must be positive");
    if (!(opt.width_filter >= 0.0)) throw DomainError("threshold_scan: width_filter must be >= 0");

    ThresholdResult r;
    r.k = k;
    r.l = l;
    r.gamma = c.gamma;
    r.grid_step = opt.grid_step;
    r.width_filter = opt.width_filter;
    r.A_max = opt.A_max;

    const long n = std::lround(std::floor(opt.A_max / opt.grid_step + 1e-9));
    const int workers = std::max(1, opt.workers);
    const long block = opt.early_stop ? 16L * workers : n;
    // Decimal grid values are compared with a little slack so that 0.2 spans
    // exactly 20 steps of 0.01.
    const double slack = 1e-9;

    auto evaluate = [&](long i) {
        const double A = i * opt.grid_step;
        const Monodromy mon = monodromy(make_hill_problem(c, k, l, A), opt.integrator);
        return ScanPoint{A, mon.trace, classify_trace(mon.trace)};
    };

    long run_start = -1;  // index into r.trace of the current unstable run
    for (long first = 1; first <= n; first += block) {
        const long last = std::min(n, first + block - 1);
        std::vector<ScanPoint> pts(last - first + 1);
        parallel_for(first, last, workers, [&](long i) { pts[i - first] = evaluate(i); });
        for (const ScanPoint& pt : pts) {
            r.trace.push_back(pt);
            const long idx = long(r.trace.size()) - 1;
            if (pt.status == Stability::Unstable) {
                if (run_start < 0) run_start = idx;
                const double width = pt.A - r.trace[run_start].A;
                if (!r.A_crit && width >= opt.width_filter - slack) {
                    r.A_crit = r.trace[run_start].A;
                }
            } else {
                run_start = -1;
            }
        }
        if (r.A_crit && opt.early_stop) break;
    }
    r.intervals = unstable_intervals(r.trace);
    const double A_ref = r.A_crit.value_or(opt.A_max);
    r.E_crit = energy_of(A_ref, 0.0, c.rho_k(k), c.b_k(k));
    return r;
}

FlutterEnergy flutter_energy(const ThresholdResult& l1, const ThresholdResult& l2) {
    if (l1.k != l2.k) throw DomainError("flutter_energy: scans must share k");
    const bool lb = l1.exceeded() && l2.exceeded();
    // A finite threshold always beats a lower bound.
    if (l1.exceeded() != l2.exceeded()) {
        const ThresholdResult& f = l1.exceeded() ? l2 : l1;
        return FlutterEnergy{f.E_crit, f.l, false};
    }
    return l1.E_crit <= l2.E_crit ? FlutterEnergy{l1.E_crit, l1.l, lb}
                                  : FlutterEnergy{l2.E_crit, l2.l, lb};
}

void write_scan_csv(std::ostream& os, const ThresholdResult& r) {
    os << "A,trace,status\n";
    for (const auto& p : r.trace) {
        os << fmt17(p.A) << ',' << fmt17(p.trace) << ',' << to_string(p.status) << '\n';
    }
}

std::string threshold_json(const ThresholdResult& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["l"] = r.l;
    j["gamma"] = r.gamma;
    if (r.A_crit) {
        j["A_crit"] = *r.A_crit;
    } else {
        j["exceeded"] = r.A_max;
    }
    j["E_crit"] = r.E_crit;
    return j.dump();
}

}  // namespace flutter
