#pragma once

// The 16-mode Galerkin system
//   phi_k'' + (gamma mu_k + A_k) phi_k + sum_{j1>=j2>=j3} B_{j1 j2 j3 k} phi_j1 phi_j2 phi_j3 = 0,
// its conserved energy, perturbation probes of the torsional slots and the
// coupled threshold scan.

#include "flutter/duffing.hpp"
#include "flutter/hill.hpp"
#include "flutter/modal_coefficients.hpp"
#include "flutter/plate_spectrum.hpp"

#include <array>
#include <iosfwd>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace flutter {

using ModalVector = std::array<double, ModeBasis::kModes>;

struct CoupledState {
    ModalVector phi{};
    ModalVector dphi{};
    double t = 0.0;
};

class CoupledSystem {
public:
    /// Eigenvalues are taken from the basis modes, in basis order.
    CoupledSystem(const ModeBasis& basis, const GalerkinTensor& T, double gamma);

    double gamma() const { return gamma_; }
    /// gamma * eigenvalue + A_k for each slot.
    const ModalVector& stiffness() const { return stiffness_; }

    /// F_k = sum_{j1>=j2>=j3} B_{j1 j2 j3 k} phi_j1 phi_j2 phi_j3.
    ModalVector cubic_forces(const ModalVector& phi) const;
    /// -(stiffness_k phi_k + F_k).
    ModalVector accelerations(const ModalVector& phi) const;
    void accelerations(const ModalVector& phi, ModalVector& out) const;

    /// sum F_k phi_k / 4, the quartic potential.
    double quartic_potential(const ModalVector& phi) const;
    double potential(const ModalVector& phi) const;
    double energy(const ModalVector& phi, const ModalVector& dphi) const;
    double energy(const CoupledState& s) const { return energy(s.phi, s.dphi); }

    /// Smallest slot set (1-based) containing the support of s that no
    /// tensor term can leave; slots outside it stay exactly zero.
    std::set<int> invariant_closure(const CoupledState& s) const;
    /// Copy keeping only terms whose three factors lie in active. Forces
    /// agree exactly with the full system on states supported in active.
    CoupledSystem restricted_to(const std::set<int>& active) const;
    std::size_t term_count() const { return terms_.size(); }

private:
    struct Term {
        int j1, j2, j3;  // zero-based, j1 >= j2 >= j3
        int k;
        double value;
    };
    double gamma_;
    ModalVector stiffness_{};
    std::vector<Term> terms_;  // grouped by (j1, j2, j3)
};

struct CoupledSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Allowed |H(t) - H(0)| / H(0) over the whole run.
    double max_rel_drift = 1e-6;
};

struct CoupledTrajectory {
    std::vector<CoupledState> samples;
    CoupledState final_state;
    double energy0 = 0.0;
    double max_rel_drift = 0.0;
    int retries = 0;
};

/// Integrates from s0 over [s0.t, s0.t + duration], duration > 0.
///
/// Samples every output_dt from the dense interpolant, at every accepted step
/// when output_dt == 0, and only at the end points when output_dt < 0. The
/// energy is checked at every accepted step; when the drift budget is
/// exceeded the run is repeated once with tolerances tightened by 100x and
/// IntegrationError is thrown if it fails again.
CoupledTrajectory integrate(const CoupledSystem& sys, const CoupledState& s0, double duration,
                            const CoupledSettings& settings = {}, double output_dt = 0.0);

/// Header "t,phi_1,...,phi_16".
void write_trajectory_csv(std::ostream& os, const CoupledTrajectory& traj);

struct ProbeConfig {
    int k = 1;            // excited longitudinal slot, 1..14
    int l = 15;           // probed torsional slot, 15 or 16
    double A = 0.0;
    double delta = 5e-4;
    double horizon = 300.0;
    double growth_ratio = 50.0;

    void validate() const;
};

struct ProbeResult {
    ProbeConfig cfg;
    double max_ratio = 0.0;  // max_t |phi_l(t)| / delta
    Stability status = Stability::Stable;
    double t_stop = 0.0;     // end of the integration
    double max_rel_drift = 0.0;
};

/// phi_k(0) = A, phi_l(0) = phi_l'(0) = delta, everything else zero.
CoupledState probe_initial_state(const ProbeConfig& cfg);

/// Integrates the perturbed problem and stops as soon as |phi_l| reaches
/// growth_ratio * delta, which classifies the run as unstable.
ProbeResult probe(const CoupledSystem& sys, const ProbeConfig& cfg,
                  const CoupledSettings& settings = {});

/// {"k":..,"l":..,"A":..,"delta":..,"max_ratio":..,"status":..}
std::string probe_json(const ProbeResult& r);

struct CoupledScanOptions {
    double grid_step = 0.01;
    double A_max = 10.0;
    double delta = 5e-4;
    double horizon = 300.0;
    double growth_ratio = 50.0;
    int workers = 1;
    bool early_stop = true;
    CoupledSettings integrator{};
};

/// Probes A = i * grid_step, i = 1 .. A_max/grid_step, for torsional mode l
/// (1 or 2, slot 14 + l). A_crit is the first unstable grid point. The trace
/// entries hold max_ratio in place of a monodromy trace. E_crit is the energy
/// of the unperturbed initial state at A_crit, or at A_max when exceeded.
ThresholdResult coupled_threshold_scan(const CoupledSystem& sys, int k, int l,
                                       const CoupledScanOptions& opt = {});

/// Coefficients of the two-mode system
///   phi'' + rho phi + b phi^3 + alpha1 xi^2 phi + alpha2 xi phi^2 = 0,
///   xi'' + (delta + d phi^2) xi + beta1 phi xi^2 + beta2 xi^3 = 0.
struct TwoModeSystem {
    double rho = 0.0;
    double b = 0.0;
    double delta = 0.0;
    double d = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

/// Linearized pair for longitudinal k and torsional l (alphas, betas zero).
TwoModeSystem two_mode_system(const ModalCoefficients& c, int k, int l);

struct TwoModeSample {
    double t;
    double phi;
    double dphi;
    double xi;
    double dxi;
};

struct TwoModeTrajectory {
    std::vector<TwoModeSample> samples;
    double max_abs_xi = 0.0;
    bool escaped = false;  // stopped once max_abs_xi exceeded xi_limit
};

/// Integrates from (phi0, phi1, xi0, xi1) over [0, t_end]. max_abs_xi is
/// tracked on the dense interpolant regardless of output_dt. The run stops
/// after the first step on which |xi| exceeds xi_limit.
TwoModeTrajectory nonlinear_2x2(const TwoModeSystem& s, double phi0, double phi1, double xi0,
                                double xi1, double t_end, const IntegratorSettings& settings = {},
                                double output_dt = 0.0,
                                double xi_limit = std::numeric_limits<double>::infinity());

}  // namespace flutter
