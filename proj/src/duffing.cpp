#include "flutter/duffing.hpp"

#include "flutter/errors.hpp"
#include "flutter/format.hpp"
#include "flutter/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace flutter {

using numerics::pi;

namespace {

void check_params(double rho, double b) {
    if (!(rho > 0.0)) throw DomainError("duffing: rho must be positive");
    if (!(b >= 0.0)) throw DomainError("duffing: b must be non-negative");
}

}  // namespace

double energy_of(double phi0, double phi1, double rho, double b) {
    const double p2 = phi0 * phi0;
    return 0.5 * phi1 * phi1 + 0.5 * rho * p2 + 0.25 * b * p2 * p2;
}

double lambda_minus(double E, double rho, double b) {
    check_params(rho, b);
    if (E < 0.0) throw DomainError("duffing: energy must be non-negative");
    if (b == 0.0) return 2.0 * E / rho;
    // Rationalized to avoid cancellation at small E.
    return 4.0 * E / (std::sqrt(rho * rho + 4.0 * b * E) + rho);
}

double lambda_plus(double E, double rho, double b) {
    check_params(rho, b);
    if (E < 0.0) throw DomainError("duffing: energy must be non-negative");
    if (b == 0.0) throw DomainError("duffing: lambda_plus is unbounded for b = 0");
    return (std::sqrt(rho * rho + 4.0 * b * E) + rho) / b;
}

double amplitude_of(double E, double rho, double b) { return std::sqrt(lambda_minus(E, rho, b)); }

double elliptic_parameter(double E, double rho, double b) {
    check_params(rho, b);
    if (E < 0.0) throw DomainError("duffing: energy must be non-negative");
    const double x = 4.0 * b * E / (rho * rho);
    const double r = std::sqrt(1.0 + x);
    // (1 - 1/r)/2 written without cancellation.
    return 0.5 * x / ((1.0 + r) * r);
}

double period(double E, double rho, double b) {
    if (!(E > 0.0)) throw DomainError("period: energy must be positive");
    const double mu = elliptic_parameter(E, rho, b);
    const double s = std::sqrt(std::sqrt(rho * rho + 4.0 * b * E));
    return 4.0 * numerics::elliptic_k(mu) / s;
}

double period_at_zero(double rho) {
    if (!(rho > 0.0)) throw DomainError("duffing: rho must be positive");
    return 2.0 * pi / std::sqrt(rho);
}

DuffingOrbit make_orbit(double E, double rho, double b) {
    check_params(rho, b);
    return DuffingOrbit{rho, b, E, amplitude_of(E, rho, b),
                        E > 0.0 ? period(E, rho, b) : period_at_zero(rho)};
}

OrbitTrajectory solve_orbit(double phi0, double phi1, double rho, double b, double t_end,
                            const IntegratorSettings& settings, double output_dt) {
    check_params(rho, b);
    if (!(t_end > 0.0)) throw DomainError("solve_orbit: t_end must be positive");
    const double E0 = energy_of(phi0, phi1, rho, b);
    const double budget = settings.drift_per_100 * std::max(1.0, t_end / 100.0) * E0;

    auto rhs = [rho, b](double, const ode::Vec<2>& y, ode::Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = -rho * y[0] - b * y[0] * y[0] * y[0];
    };

    ode::Options opt;
    opt.rtol = settings.rtol;
    opt.atol = settings.atol;
    for (int attempt = 0; attempt < 2; ++attempt) {
        OrbitTrajectory traj{{}, rho, b, E0, 0.0, attempt};
        traj.samples.push_back({0.0, phi0, phi1});
        ode::OutputGrid grid(0.0, output_dt, t_end);
        auto record = [&](double t, double p, double dp) {
            traj.samples.push_back({t, p, dp});
            traj.max_drift = std::max(traj.max_drift, std::abs(energy_of(p, dp, rho, b) - E0));
        };
        auto observer = [&](const ode::DenseStep<2>& seg, double t, const ode::Vec<2>& y) {
            if (output_dt > 0.0) {
                for (; grid.due(t); grid.advance()) {
                    const double tt = std::min(grid.next(), t);
                    record(grid.next(), seg.component(0, tt), seg.component(1, tt));
                }
            } else {
                record(t, y[0], y[1]);
            }
        };
        ode::Vec<2> y{phi0, phi1};
        ode::integrate<2>(rhs, 0.0, y, t_end, opt, observer);
        // The final state is always checked, whatever the sampling.
        traj.max_drift = std::max(traj.max_drift, std::abs(energy_of(y[0], y[1], rho, b) - E0));
        if (traj.max_drift <= budget) return traj;
        opt.rtol *= 1e-2;
        opt.atol *= 1e-2;
    }
    std::ostringstream msg;
    msg << "solve_orbit: energy drift exceeds " << budget << " after tolerance tightening";
    throw IntegrationError(msg.str());
}

void write_orbit_csv(std::ostream& os, const OrbitTrajectory& traj) {
    os << "t,phi,dphi,energy\n";
    for (const auto& s : traj.samples) {
        os << fmt17(s.t) << ',' << fmt17(s.phi) << ',' << fmt17(s.dphi) << ','
           << fmt17(energy_of(s.phi, s.dphi, traj.rho, traj.b)) << '\n';
    }
}

}  // namespace flutter
