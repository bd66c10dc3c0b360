#pragma once

// Physical parameters of the Tacoma Narrows Bridge deck and conversion of
// nondimensional amplitudes to meters.

#include "flutter/hill.hpp"
#include "flutter/plate_spectrum.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace flutter {

struct TnbInputs {
    double span = 853.44;                 // L [m]
    double half_width = 853.44 / 150.0;   // ell [m], so that 2 ell / L = 1/75
    double sag = 70.0;                    // h [m]
    double weight_per_length = 83000.0;   // w [N/m]
    double mass_density = 635.0;          // m [kg/m^2]
    double young = 2.1e11;                // E [Pa]
    double inertia = 0.1528;              // I [m^4]
    double poisson = 0.2;                 // sigma

    void validate() const;
};

struct TnbParameters {
    TnbInputs in;
    double H = 0.0;       // cable tension w L^2/(8 h) [N]
    double Gamma = 0.0;   // plate rigidity E I/(2 ell (1 - sigma^2)) [Pa m^3]
    double d = 0.0;       // equivalent thickness (12 (1 - sigma^2) Gamma/E)^{1/3} [m]
    double gamma = 0.0;   // pi^4 Gamma/(6000 H L)
    double k1 = 0.0;      // 6000 H/L^3, linear hanger stiffness [N/m^3]
    double k2 = 0.0;      // 6000 H/L^3, cubic hanger stiffness

    /// sqrt(k1/k2), the factor between nondimensional and metric amplitudes.
    double amplitude_scale() const;
};

TnbParameters derive_parameters(const TnbInputs& in = {});

/// A * sup norm of the L2-normalized longitudinal mode k * scale.
double displacement_meters(double A, int k, const ModeBasis& basis, double scale = 1.0);

struct DisplacementRow {
    int k = 0;
    double meters[2] = {0.0, 0.0};
    bool lower_bound[2] = {false, false};  // threshold exceeded A_max
};

/// One row per k from the l = 1 and l = 2 scans, which must cover the same k
/// in the same order.
std::vector<DisplacementRow> displacement_table(const std::vector<ThresholdResult>& l1,
                                                const std::vector<ThresholdResult>& l2,
                                                const ModeBasis& basis, double scale = 1.0);

/// Header "k,meters_l1,meters_l2"; lower bounds are written as ">value".
void write_displacement_csv(std::ostream& os, const std::vector<DisplacementRow>& rows);

/// All inputs and derived quantities as one JSON object.
std::string parameters_json(const TnbParameters& p);

}  // namespace flutter
