#include "flutter/coupled.hpp"

#include "flutter/errors.hpp"
#include "flutter/format.hpp"
#include "flutter/ode.hpp"
#include "flutter/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace flutter {

namespace {

constexpr int kN = ModeBasis::kModes;
using State = ode::Vec<2 * kN>;

State pack(const CoupledState& s) {
    State y{};
    std::copy(s.phi.begin(), s.phi.end(), y.begin());
    std::copy(s.dphi.begin(), s.dphi.end(), y.begin() + kN);
    return y;
}

CoupledState unpack(double t, const State& y) {
    CoupledState s;
    std::copy(y.begin(), y.begin() + kN, s.phi.begin());
    std::copy(y.begin() + kN, y.end(), s.dphi.begin());
    s.t = t;
    return s;
}

double state_energy(const CoupledSystem& sys, const State& y) {
    ModalVector phi, dphi;
    std::copy(y.begin(), y.begin() + kN, phi.begin());
    std::copy(y.begin() + kN, y.end(), dphi.begin());
    return sys.energy(phi, dphi);
}

// One integration attempt. visit(seg, t, y) returns false to stop early.
// Returns the largest relative energy drift seen at accepted steps.
template <class Visit>
double run_attempt(const CoupledSystem& sys, State& y, double t0, double t1,
                   const ode::Options& opt, double& t_stop, Visit&& visit) {
    const double E0 = state_energy(sys, y);
    double max_drift = 0.0;
    auto rhs = [&sys](double, const State& u, State& du) {
        ModalVector phi, acc;
        std::copy(u.begin(), u.begin() + kN, phi.begin());
        sys.accelerations(phi, acc);
        std::copy(u.begin() + kN, u.end(), du.begin());
        std::copy(acc.begin(), acc.end(), du.begin() + kN);
    };
    auto observer = [&](const ode::DenseStep<2 * kN>& seg, double t, const State& u) {
        const double drift = std::abs(state_energy(sys, u) - E0);
        max_drift = std::max(max_drift, E0 > 0.0 ? drift / E0 : drift);
        return visit(seg, t, u);
    };
    const ode::Stats st = ode::integrate<2 * kN>(rhs, t0, y, t1, opt, observer);
    t_stop = st.t_final;
    return max_drift;
}

void check_slot_pair(int k, int l) {
    if (k < 1 || k > ModeBasis::kLongitudinal) {
        throw DomainError("coupled: longitudinal slot must lie in 1..14");
    }
    if (l != ModeBasis::kLongitudinal + 1 && l != ModeBasis::kLongitudinal + 2) {
        throw DomainError("coupled: torsional slot must be 15 or 16");
    }
}

}  // namespace

CoupledSystem::CoupledSystem(const ModeBasis& basis, const GalerkinTensor& T, double gamma)
    : gamma_(gamma) {
    if (!(gamma > 0.0)) throw DomainError("coupled: gamma must be positive");
    for (int k = 1; k <= kN; ++k) {
        stiffness_[k - 1] = gamma * basis.mode(k).pair.lambda + T.A[k - 1];
    }
    // Map order groups entries sharing (j1, j2, j3).
    terms_.reserve(T.B.size());
    for (const auto& [key, value] : T.B) {
        terms_.push_back(Term{key[0] - 1, key[1] - 1, key[2] - 1, key[3] - 1, value});
    }
}

ModalVector CoupledSystem::cubic_forces(const ModalVector& phi) const {
    ModalVector F{};
    int p1 = -1, p2 = -1, p3 = -1;
    double prod = 0.0;
    for (const Term& t : terms_) {
        if (t.j1 != p1 || t.j2 != p2 || t.j3 != p3) {
            p1 = t.j1;
            p2 = t.j2;
            p3 = t.j3;
            prod = phi[p1] * phi[p2] * phi[p3];
        }
        F[t.k] += t.value * prod;
    }
    return F;
}

void CoupledSystem::accelerations(const ModalVector& phi, ModalVector& out) const {
    out = cubic_forces(phi);
    for (int k = 0; k < kN; ++k) out[k] = -(stiffness_[k] * phi[k] + out[k]);
}

ModalVector CoupledSystem::accelerations(const ModalVector& phi) const {
    ModalVector out;
    accelerations(phi, out);
    return out;
}

double CoupledSystem::quartic_potential(const ModalVector& phi) const {
    const ModalVector F = cubic_forces(phi);
    double s = 0.0;
    for (int k = 0; k < kN; ++k) s += F[k] * phi[k];
    return 0.25 * s;
}

double CoupledSystem::potential(const ModalVector& phi) const {
    double s = 0.0;
    for (int k = 0; k < kN; ++k) s += 0.5 * stiffness_[k] * phi[k] * phi[k];
    return s + quartic_potential(phi);
}

double CoupledSystem::energy(const ModalVector& phi, const ModalVector& dphi) const {
    double s = 0.0;
    for (int k = 0; k < kN; ++k) s += 0.5 * dphi[k] * dphi[k];
    return s + potential(phi);
}

std::set<int> CoupledSystem::invariant_closure(const CoupledState& s) const {
    std::set<int> active;
    for (int k = 0; k < kN; ++k) {
        if (s.phi[k] != 0.0 || s.dphi[k] != 0.0) active.insert(k + 1);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (const Term& t : terms_) {
            if (active.count(t.j1 + 1) && active.count(t.j2 + 1) && active.count(t.j3 + 1) &&
                active.insert(t.k + 1).second) {
                grew = true;
            }
        }
    }
    return active;
}

CoupledSystem CoupledSystem::restricted_to(const std::set<int>& active) const {
    CoupledSystem r = *this;
    r.terms_.clear();
    for (const Term& t : terms_) {
        if (active.count(t.j1 + 1) && active.count(t.j2 + 1) && active.count(t.j3 + 1)) {
            r.terms_.push_back(t);
        }
    }
    return r;
}

CoupledTrajectory integrate(const CoupledSystem& full, const CoupledState& s0, double duration,
                            const CoupledSettings& settings, double output_dt) {
    if (!(duration > 0.0)) throw DomainError("coupled integrate: duration must be positive");
    const CoupledSystem sys = full.restricted_to(full.invariant_closure(s0));
    const double t0 = s0.t;
    const double t1 = t0 + duration;
    ode::Options opt;
    opt.rtol = settings.rtol;
    opt.atol = settings.atol;
    for (int attempt = 0; attempt < 2; ++attempt) {
        CoupledTrajectory traj;
        traj.energy0 = sys.energy(s0);
        traj.retries = attempt;
        traj.samples.push_back(s0);
        ode::OutputGrid grid(t0, output_dt, t1);
        auto visit = [&](const ode::DenseStep<2 * kN>& seg, double t, const State& u) {
            if (output_dt > 0.0) {
                for (; grid.due(t); grid.advance()) {
                    traj.samples.push_back(unpack(grid.next(), seg(std::min(grid.next(), t))));
                }
            } else if (output_dt == 0.0) {
                traj.samples.push_back(unpack(t, u));
            }
            return true;
        };
        State y = pack(s0);
        double t_stop = t0;
        traj.max_rel_drift = run_attempt(sys, y, t0, t1, opt, t_stop, visit);
        traj.final_state = unpack(t1, y);
        if (output_dt < 0.0) traj.samples.push_back(traj.final_state);
        if (traj.max_rel_drift <= settings.max_rel_drift) return traj;
        opt.rtol *= 1e-2;
        opt.atol *= 1e-2;
    }
    std::ostringstream msg;
    msg << "coupled integrate: relative energy drift exceeds " << settings.max_rel_drift
        << " after tolerance tightening";
    throw IntegrationError(msg.str());
}

void write_trajectory_csv(std::ostream& os, const CoupledTrajectory& traj) {
    os << 't';
    for (int k = 1; k <= kN; ++k) os << ",phi_" << k;
    os << '\n';
    for (const CoupledState& s : traj.samples) {
        os << fmt17(s.t);
        for (double v : s.phi) os << ',' << fmt17(v);
        os << '\n';
    }
}

void ProbeConfig::validate() const {
    check_slot_pair(k, l);
    if (!(A >= 0.0)) throw DomainError("probe: A must be non-negative");
    if (!(delta > 0.0)) throw DomainError("probe: delta must be positive");
    if (!(horizon > 0.0)) throw DomainError("probe: horizon must be positive");
    if (!(growth_ratio > 1.0)) throw DomainError("probe: growth_ratio must exceed 1");
}

CoupledState probe_initial_state(const ProbeConfig& cfg) {
    cfg.validate();
    CoupledState s;
    s.phi[cfg.k - 1] = cfg.A;
    s.phi[cfg.l - 1] = cfg.delta;
    s.dphi[cfg.l - 1] = cfg.delta;
    return s;
}

ProbeResult probe(const CoupledSystem& full, const ProbeConfig& cfg,
                  const CoupledSettings& settings) {
    const CoupledState s0 = probe_initial_state(cfg);
    const CoupledSystem sys = full.restricted_to(full.invariant_closure(s0));
    const int slot = cfg.l - 1;
    const double limit = cfg.growth_ratio * cfg.delta;
    ode::Options opt;
    opt.rtol = settings.rtol;
    opt.atol = settings.atol;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ProbeResult r;
        r.cfg = cfg;
        double peak = cfg.delta;
        // Four interior points per step catch extrema between step ends.
        auto visit = [&](const ode::DenseStep<2 * kN>& seg, double, const State& u) {
            peak = std::max(peak, std::abs(u[slot]));
            for (int q = 1; q <= 4; ++q) {
                peak = std::max(peak, std::abs(seg.component(slot, seg.t0 + 0.2 * q * seg.h)));
            }
            return peak < limit;
        };
        State y = pack(s0);
        r.max_rel_drift = run_attempt(sys, y, 0.0, cfg.horizon, opt, r.t_stop, visit);
        r.max_ratio = peak / cfg.delta;
        r.status = peak >= limit ? Stability::Unstable : Stability::Stable;
        if (r.max_rel_drift <= settings.max_rel_drift) return r;
        opt.rtol *= 1e-2;
        opt.atol *= 1e-2;
    }
    std::ostringstream msg;
    msg << "probe: relative energy drift exceeds " << settings.max_rel_drift
        << " after tolerance tightening";
    throw IntegrationError(msg.str());
}

std::string probe_json(const ProbeResult& r) {
    nlohmann::ordered_json j;
    j["k"] = r.cfg.k;
    j["l"] = r.cfg.l;
    j["A"] = r.cfg.A;
    j["delta"] = r.cfg.delta;
    j["max_ratio"] = r.max_ratio;
    j["status"] = to_string(r.status);
    return j.dump();
}

ThresholdResult coupled_threshold_scan(const CoupledSystem& sys, int k, int l,
                                       const CoupledScanOptions& opt) {
    if (l != 1 && l != 2) throw DomainError("coupled_threshold_scan: l must be 1 or 2");
    check_slot_pair(k, ModeBasis::kLongitudinal + l);
    if (!(opt.grid_step > 0.0)) throw DomainError("coupled_threshold_scan: grid_step must be positive");
    if (!(opt.A_max > 0.0)) throw DomainError("coupled_threshold_scan: A_max must be positive");

    ThresholdResult r;
    r.k = k;
    r.l = l;
    r.gamma = sys.gamma();
    r.grid_step = opt.grid_step;
    r.width_filter = 0.0;
    r.A_max = opt.A_max;

    const long n = std::lround(std::floor(opt.A_max / opt.grid_step + 1e-9));
    const int workers = std::max(1, opt.workers);
    const long block = opt.early_stop ? 4L * workers : n;

    auto evaluate = [&](long i) {
        ProbeConfig cfg;
        cfg.k = k;
        cfg.l = ModeBasis::kLongitudinal + l;
        cfg.A = i * opt.grid_step;
        cfg.delta = opt.delta;
        cfg.horizon = opt.horizon;
        cfg.growth_ratio = opt.growth_ratio;
        const ProbeResult p = probe(sys, cfg, opt.integrator);
        return ScanPoint{cfg.A, p.max_ratio, p.status};
    };

    for (long first = 1; first <= n; first += block) {
        const long last = std::min(n, first + block - 1);
        std::vector<ScanPoint> pts(last - first + 1);
        parallel_for(first, last, workers, [&](long i) { pts[i - first] = evaluate(i); });
        for (const ScanPoint& pt : pts) {
            r.trace.push_back(pt);
            if (!r.A_crit && pt.status == Stability::Unstable) r.A_crit = pt.A;
        }
        if (r.A_crit && opt.early_stop) break;
    }
    r.intervals = unstable_intervals(r.trace);
    ModalVector phi{};
    phi[k - 1] = r.A_crit.value_or(opt.A_max);
    r.E_crit = sys.potential(phi);
    return r;
}

TwoModeSystem two_mode_system(const ModalCoefficients& c, int k, int l) {
    TwoModeSystem s;
    s.rho = c.rho_k(k);
    s.b = c.b_k(k);
    s.delta = c.delta_l(l);
    s.d = c.d_lk(l, k);
    return s;
}

TwoModeTrajectory nonlinear_2x2(const TwoModeSystem& s, double phi0, double phi1, double xi0,
                                double xi1, double t_end, const IntegratorSettings& settings,
                                double output_dt, double xi_limit) {
    const double coeffs[] = {s.rho, s.b, s.delta, s.d, s.alpha1, s.alpha2, s.beta1, s.beta2};
    for (double v : coeffs) {
        if (!std::isfinite(v)) throw DomainError("nonlinear_2x2: coefficients must be finite");
    }
    if (!(t_end > 0.0)) throw DomainError("nonlinear_2x2: t_end must be positive");
    auto rhs = [&s](double, const ode::Vec<4>& y, ode::Vec<4>& dy) {
        const double p = y[0], x = y[2];
        dy[0] = y[1];
        dy[1] = -(s.rho * p + s.b * p * p * p + s.alpha1 * x * x * p + s.alpha2 * x * p * p);
        dy[2] = y[3];
        dy[3] = -((s.delta + s.d * p * p) * x + s.beta1 * p * x * x + s.beta2 * x * x * x);
    };
    TwoModeTrajectory traj;
    traj.samples.push_back({0.0, phi0, phi1, xi0, xi1});
    traj.max_abs_xi = std::abs(xi0);
    ode::OutputGrid grid(0.0, output_dt, t_end);
    auto observer = [&](const ode::DenseStep<4>& seg, double t, const ode::Vec<4>& y) {
        traj.max_abs_xi = std::max(traj.max_abs_xi, std::abs(y[2]));
        for (int q = 1; q <= 4; ++q) {
            traj.max_abs_xi =
                std::max(traj.max_abs_xi, std::abs(seg.component(2, seg.t0 + 0.2 * q * seg.h)));
        }
        if (output_dt > 0.0) {
            for (; grid.due(t); grid.advance()) {
                const ode::Vec<4> v = seg(std::min(grid.next(), t));
                traj.samples.push_back({grid.next(), v[0], v[1], v[2], v[3]});
            }
        } else {
            traj.samples.push_back({t, y[0], y[1], y[2], y[3]});
        }
        traj.escaped = traj.max_abs_xi > xi_limit;
        return !traj.escaped;
    };
    ode::Options opt;
    opt.rtol = settings.rtol;
    opt.atol = settings.atol;
    ode::Vec<4> y{phi0, phi1, xi0, xi1};
    ode::integrate<4>(rhs, 0.0, y, t_end, opt, observer);
    return traj;
}

}  // namespace flutter
