#include "flutter/tnb.hpp"

#include "flutter/errors.hpp"
#include "flutter/format.hpp"
#include "flutter/numerics.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace flutter {

void TnbInputs::validate() const {
    const double positive[] = {span, half_width, sag, weight_per_length,
                               mass_density, young, inertia};
    for (double v : positive) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("tnb: inputs must be positive");
    }
    if (!(poisson > 0.0 && poisson < 0.5)) throw DomainError("tnb: poisson must lie in (0, 1/2)");
    if (!(half_width < span)) throw DomainError("tnb: half_width must be below span");
}

double TnbParameters::amplitude_scale() const { return std::sqrt(k1 / k2); }

TnbParameters derive_parameters(const TnbInputs& in) {
    in.validate();
    TnbParameters p;
    p.in = in;
    const double L = in.span;
    const double s2 = 1.0 - in.poisson * in.poisson;
    p.H = in.weight_per_length * L * L / (8.0 * in.sag);
    p.Gamma = in.young * in.inertia / (2.0 * in.half_width * s2);
    p.d = std::cbrt(12.0 * s2 * p.Gamma / in.young);
    const double pi = numerics::pi;
    p.gamma = pi * pi * pi * pi * p.Gamma / (6000.0 * p.H * L);
    p.k1 = 6000.0 * p.H / (L * L * L);
    p.k2 = p.k1;
    return p;
}

double displacement_meters(double A, int k, const ModeBasis& basis, double scale) {
    if (!(A >= 0.0)) throw DomainError("displacement_meters: A must be non-negative");
    if (!(scale > 0.0)) throw DomainError("displacement_meters: scale must be positive");
    return A * sup_norm_mode(k, basis) * scale;
}

std::vector<DisplacementRow> displacement_table(const std::vector<ThresholdResult>& l1,
                                                const std::vector<ThresholdResult>& l2,
                                                const ModeBasis& basis, double scale) {
    if (l1.size() != l2.size()) throw DomainError("displacement_table: scan lists differ in size");
    std::vector<DisplacementRow> rows;
    for (std::size_t i = 0; i < l1.size(); ++i) {
        if (l1[i].k != l2[i].k) throw DomainError("displacement_table: scans must share k");
        DisplacementRow row;
        row.k = l1[i].k;
        const double norm = sup_norm_mode(row.k, basis) * scale;
        const ThresholdResult* r[2] = {&l1[i], &l2[i]};
        for (int j = 0; j < 2; ++j) {
            row.lower_bound[j] = r[j]->exceeded();
            row.meters[j] = r[j]->A_crit.value_or(r[j]->A_max) * norm;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_displacement_csv(std::ostream& os, const std::vector<DisplacementRow>& rows) {
    os << "k,meters_l1,meters_l2\n";
    for (const DisplacementRow& row : rows) {
        os << row.k;
        for (int j = 0; j < 2; ++j) {
            os << ',' << (row.lower_bound[j] ? ">" : "") << fmt17(row.meters[j]);
        }
        os << '\n';
    }
}

std::string parameters_json(const TnbParameters& p) {
    nlohmann::ordered_json j;
    j["span"] = p.in.span;
    j["half_width"] = p.in.half_width;
    j["sag"] = p.in.sag;
    j["weight_per_length"] = p.in.weight_per_length;
    j["mass_density"] = p.in.mass_density;
    j["young"] = p.in.young;
    j["inertia"] = p.in.inertia;
    j["poisson"] = p.in.poisson;
    j["H"] = p.H;
    j["Gamma"] = p.Gamma;
    j["d"] = p.d;
    j["gamma"] = p.gamma;
    j["k1"] = p.k1;
    j["k2"] = p.k2;
    j["amplitude_scale"] = p.amplitude_scale();
    return j.dump();
}

}  // namespace flutter
