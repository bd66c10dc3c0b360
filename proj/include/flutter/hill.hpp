#pragma once

// Linear stability of the torsional mode l along the periodic orbit of the
// longitudinal mode k: xi'' + (delta_l + d_{l,k} phi_k(t)^2) xi = 0, whose
// coefficient has half the orbit period.

#include "flutter/duffing.hpp"
#include "flutter/modal_coefficients.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flutter {

struct HillProblem {
    int k = 1;
    int l = 1;
    double delta = 0.0;
    double d = 0.0;
    DuffingOrbit orbit{};

    double amplitude() const { return orbit.amplitude; }
    /// Period of the Hill coefficient, half the orbit period.
    double coefficient_period() const { return 0.5 * orbit.period; }
    double coefficient_min() const { return delta; }
    double coefficient_max() const { return delta + d * orbit.amplitude * orbit.amplitude; }
};

/// Problem for longitudinal mode k launched from (A, 0).
HillProblem make_hill_problem(const ModalCoefficients& c, int k, int l, double A);
/// Problem for longitudinal mode k at energy E.
HillProblem make_hill_problem_energy(const ModalCoefficients& c, int k, int l, double E);

struct Monodromy {
    std::array<std::array<double, 2>, 2> M{};  // columns from (1,0) and (0,1)
    double trace = 0.0;
    double det = 0.0;
    double sqrt_coefficient_integral = 0.0;  // int_0^{T/2} sqrt(A(t)) dt
};

/// Fundamental matrix over one coefficient period. E = 0 is handled in closed
/// form; otherwise the orbit, both Hill columns and the sqrt-coefficient
/// integral are integrated together as one system.
Monodromy monodromy(const HillProblem& p, const IntegratorSettings& s = {});

enum class Stability { Stable, Unstable, Marginal };
std::string to_string(Stability s);

inline constexpr double kTraceTolerance = 1e-8;

Stability classify_trace(double trace, double tol = kTraceTolerance);

/// log of the spectral radius of a unimodular 2x2 matrix with this trace.
double growth_exponent(double trace);

struct ResonanceFlags {
    double ratio = 0.0;          // sqrt(delta/rho)
    int m_below = 0;             // largest integer strictly below ratio
    bool near_integer = false;   // ratio within 1e-9 of a positive integer
    int resonant_m = -1;         // ratio = resonant_m + 1 when near_integer
    bool strange3 = false;       // 2(2 + (m+1) pi) d < 3 pi (m+1)^3 b, m = resonant_m
};

ResonanceFlags resonance_flags(int k, int l, const ModalCoefficients& c);

bool zhukovskii_check(const HillProblem& p);

struct BurdinaResult {
    bool pass = false;
    double integral = 0.0;  // int_0^{T/2} sqrt(A) dt
    double log_term = 0.0;  // log(max A/min A)/2
};

/// Uses mon.sqrt_coefficient_integral when given, else integrates it.
BurdinaResult burdina_check(const HillProblem& p, const Monodromy* mon = nullptr,
                            const IntegratorSettings& s = {});

struct StabilityVerdict {
    Stability status = Stability::Stable;
    double monodromy_trace = 0.0;
    double growth_exponent = 0.0;
    bool zhukovskii = false;
    bool burdina = false;
    ResonanceFlags flags;
};

StabilityVerdict assess(const HillProblem& p, const ModalCoefficients& c,
                        const IntegratorSettings& s = {});

struct GrowthSample {
    double t;
    double xi;
};

struct GrowthResult {
    double max_abs_xi = 0.0;
    std::vector<GrowthSample> samples;
};

/// Integrates the Hill equation from xi(0) = xi'(0) = 1 alongside the orbit
/// launched from (amplitude, 0).
GrowthResult growth_simulation(const HillProblem& p, double t_end,
                               const IntegratorSettings& s = {}, double output_dt = 0.0);

struct ScanOptions {
    double grid_step = 0.01;
    double width_filter = 0.2;
    double A_max = 20.0;
    int workers = 1;
    bool early_stop = true;
    IntegratorSettings integrator{};
};

struct ScanPoint {
    double A;
    double trace;
    Stability status;
};

struct UnstableInterval {
    double start;
    double end;
    double width() const { return end - start; }
};

struct ThresholdResult {
    int k = 0;
    int l = 0;
    double gamma = 0.0;
    double grid_step = 0.0;
    double width_filter = 0.0;
    double A_max = 0.0;
    std::optional<double> A_crit;  // empty when the scan reached A_max
    double E_crit = 0.0;           // at A_crit, or at A_max as a lower bound
    std::vector<ScanPoint> trace;
    std::vector<UnstableInterval> intervals;

    bool exceeded() const { return !A_crit.has_value(); }
};

/// Grid points A = i * grid_step, i = 1 .. A_max/grid_step, classified by the
/// monodromy trace. Runs of consecutive unstable points form intervals; the
/// result is the start of the first interval whose width reaches
/// width_filter. Scanning stops there when early_stop is set.
ThresholdResult threshold_scan(int k, int l, const ModalCoefficients& c,
                               const ScanOptions& opt = {});

/// Splits consecutive unstable points of a scan trace into intervals.
std::vector<UnstableInterval> unstable_intervals(const std::vector<ScanPoint>& trace);

struct FlutterEnergy {
    double energy;
    int l;             // torsional mode attaining the minimum
    bool lower_bound;  // both scans exceeded A_max
};

/// min over l of E_l(k) for the two scans of the same k.
FlutterEnergy flutter_energy(const ThresholdResult& l1, const ThresholdResult& l2);

/// Header "A,trace,status".
void write_scan_csv(std::ostream& os, const ThresholdResult& r);
/// {"k":..,"l":..,"gamma":..,"A_crit":..|"exceeded":A_max,"E_crit":..}
std::string threshold_json(const ThresholdResult& r);

}  // namespace flutter
