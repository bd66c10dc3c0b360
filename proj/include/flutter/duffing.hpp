#pragma once

// The decoupled longitudinal mode phi'' + rho phi + b phi^3 = 0 with
// rho, b > 0: conserved energy, amplitude and period in closed form, and
// numerically integrated orbits.

#include "flutter/ode.hpp"

#include <iosfwd>
#include <vector>

namespace flutter {

/// E = phi1^2/2 + rho phi0^2/2 + b phi0^4/4.
double energy_of(double phi0, double phi1, double rho, double b);

/// (sqrt(rho^2 + 4 b E) - rho)/b, the squared amplitude at energy E >= 0.
double lambda_minus(double E, double rho, double b);
/// (sqrt(rho^2 + 4 b E) + rho)/b.
double lambda_plus(double E, double rho, double b);
/// sqrt(lambda_minus), the sup norm of the orbit.
double amplitude_of(double E, double rho, double b);

/// Elliptic parameter (1 - rho/sqrt(rho^2 + 4 b E))/2, always in [0, 1/2).
double elliptic_parameter(double E, double rho, double b);

/// Orbit period 4 K(mu)/(rho^2 + 4 b E)^{1/4}; DomainError unless E > 0.
double period(double E, double rho, double b);

/// Small-amplitude limit 2 pi/sqrt(rho).
double period_at_zero(double rho);

struct DuffingOrbit {
    double rho;
    double b;
    double E;
    double amplitude;
    double period;
};

DuffingOrbit make_orbit(double E, double rho, double b);

struct IntegratorSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Allowed relative energy drift per 100 time units.
    double drift_per_100 = 1e-8;
};

struct OrbitSample {
    double t;
    double phi;
    double dphi;
};

struct OrbitTrajectory {
    std::vector<OrbitSample> samples;
    double rho;
    double b;
    double energy0;
    double max_drift;  // max |E(t) - E(0)| over the samples
    int retries;       // tolerance tightenings needed
};

/// Integrates the Duffing equation from (phi0, phi1) over [0, t_end].
///
/// Samples are taken every output_dt from the dense interpolant, or at each
/// accepted step when output_dt <= 0. If the energy drift exceeds the allowed
/// budget, tolerances are tightened by 100x and the run repeated once;
/// a second failure throws IntegrationError.
OrbitTrajectory solve_orbit(double phi0, double phi1, double rho, double b, double t_end,
                            const IntegratorSettings& settings = {}, double output_dt = 0.0);

/// Header "t,phi,dphi,energy", one row per sample.
void write_orbit_csv(std::ostream& os, const OrbitTrajectory& traj);

}  // namespace flutter
