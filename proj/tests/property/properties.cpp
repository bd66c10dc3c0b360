// Property suite with no stored reference tables: every check compares the
// library against an identity or an independent computation.

#include "flutter/coupled.hpp"
#include "flutter/duffing.hpp"
#include "flutter/hill.hpp"
#include "flutter/modal_coefficients.hpp"
#include "flutter/numerics.hpp"
#include "flutter/plate_spectrum.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

namespace {

using namespace flutter;
using numerics::pi;

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) ++g_failures;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void orthogonality(const ModeBasis& basis) {
    const auto G = oracle::plate_gram(basis);
    double worst = 0.0;
    for (int i = 0; i < ModeBasis::kModes; ++i)
        for (int j = 0; j < ModeBasis::kModes; ++j) worst = std::max(worst, std::abs(G[i][j] - (i == j)));
    report("orthogonality", worst < 1e-8, "max |<w_i,w_j> - delta_ij| = " + sci(worst));
}

// H2* form over L2 norm for the separable field v(y) sin(m x).
double rayleigh_quotient(const ModeProfile& p, double sigma) {
    const auto rule = oracle::gauss_legendre(20);
    const double m2 = double(p.m()) * p.m();
    const double l = p.half_width;
    auto form = [&](double y) {
        const double v = eval_profile_derivative(p, y, 0);
        const double v1 = eval_profile_derivative(p, y, 1);
        const double v2 = eval_profile_derivative(p, y, 2);
        return (v2 - m2 * v) * (v2 - m2 * v) + 2.0 * (1.0 - sigma) * m2 * (v1 * v1 + v * v2);
    };
    auto mass = [&](double y) { return std::pow(eval_profile(p, y), 2); };
    return oracle::gauss_integrate(form, -l, l, 8, rule) / oracle::gauss_integrate(mass, -l, l, 8, rule);
}

void rayleigh(const std::vector<PlateConfig>& configs) {
    double worst = 0.0;
    for (const PlateConfig& cfg : configs) {
        const ModeBasis basis = make_basis(cfg);
        for (int i = 1; i <= ModeBasis::kModes; ++i) {
            const ModeProfile& p = basis.mode(i);
            worst = std::max(worst, std::abs(rayleigh_quotient(p, cfg.poisson) / p.pair.lambda - 1.0));
        }
    }
    report("rayleigh consistency", worst < 1e-8, "max relative deviation = " + sci(worst));
}

void ordering(const std::vector<PlateConfig>& configs) {
    bool ok = true;
    for (const PlateConfig& cfg : configs) {
        const auto s = enumerate_spectrum(24, cfg);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double m4 = std::pow(s[i].m, 4);
            if (i > 0 && !(s[i - 1].lambda < s[i].lambda)) ok = false;
            if (s[i].branch == Branch::Mu1 &&
                !(s[i].lambda > std::pow(1.0 - cfg.poisson, 2) * m4 && s[i].lambda < m4))
                ok = false;
            if ((s[i].branch == Branch::MuK || s[i].branch == Branch::NuK) && !(s[i].lambda > m4)) ok = false;
        }
    }
    report("spectrum ordering and branch windows", ok, "24 eigenvalues per configuration");
}

void gradient(const ModeBasis& basis, const GalerkinTensor& T) {
    const CoupledSystem sys(basis, T, 5.17e-4);
    const oracle::StripQuarticEnergy potential(basis);
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_force = 0.0, worst_energy = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        ModalVector phi;
        for (double& x : phi) x = u(rng);
        const ModalVector F = sys.cubic_forces(phi);
        double fmax = 0.0;
        for (double f : F) fmax = std::max(fmax, std::abs(f));
        for (int k = 0; k < ModeBasis::kModes; ++k) {
            // Five-point stencil, exact for quartics along the line.
            const double h = 1e-2;
            auto at = [&](double s) {
                ModalVector p = phi;
                p[k] += s;
                return potential(p);
            };
            const double g = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
            worst_force = std::max(worst_force, std::abs(F[k] - g) / fmax);
        }
        const double V = potential(phi);
        worst_energy = std::max(worst_energy, std::abs(sys.quartic_potential(phi) - V) / V);
    }
    report("gradient vs quadrature potential", worst_force < 1e-6 && worst_energy < 1e-6,
           "force rel err " + sci(worst_force) + ", potential rel err " + sci(worst_energy));
}

void monodromy_determinant(const ModeBasis& basis) {
    std::mt19937 rng(202);
    std::uniform_int_distribution<int> kk(1, 14), ll(1, 2);
    std::uniform_real_distribution<double> logE(-5.0, 3.0);
    double worst = 0.0;
    for (double gamma : {1e-3, 5.17e-4, 1e-4}) {
        const ModalCoefficients c = compute_coefficients(basis, gamma);
        for (int i = 0; i < 70; ++i) {
            const HillProblem p = make_hill_problem_energy(c, kk(rng), ll(rng), std::pow(10.0, logE(rng)));
            worst = std::max(worst, std::abs(monodromy(p).det - 1.0));
        }
    }
    report("monodromy determinant", worst < 1e-8, "max |det - 1| over 210 samples = " + sci(worst));
}

void period_monotonicity(const ModeBasis& basis) {
    bool ok = true;
    int checked = 0;
    for (double gamma : {1e-3, 5.17e-4, 1e-4}) {
        const ModalCoefficients c = compute_coefficients(basis, gamma);
        for (int k = 1; k <= 14; ++k) {
            double prev = period_at_zero(c.rho_k(k));
            for (int i = 0; i < 80; ++i) {
                const double T = period(1e-6 * std::pow(10.0, 0.125 * i), c.rho_k(k), c.b_k(k));
                ok = ok && T < prev;
                prev = T;
                ++checked;
            }
        }
    }
    report("period monotonicity", ok, std::to_string(checked) + " energies strictly decreasing");
}

void amplitude_round_trip(const ModeBasis& basis) {
    const ModalCoefficients c = compute_coefficients(basis, 5.17e-4);
    double worst = 0.0;
    for (int k = 1; k <= 14; ++k) {
        for (int i = 0; i < 40; ++i) {
            const double E = 1e-6 * std::pow(10.0, 0.25 * i);
            const double A = amplitude_of(E, c.rho_k(k), c.b_k(k));
            worst = std::max(worst, std::abs(energy_of(A, 0.0, c.rho_k(k), c.b_k(k)) / E - 1.0));
        }
    }
    report("amplitude-energy round trip", worst < 1e-12, "max relative error = " + sci(worst));
}

void tensor_symmetry(const GalerkinTensor& T) {
    // Overlaps depend on the multiset of indices only, so B_{j1 j2 j3 k}/mult
    // must not change when k is swapped with any j.
    double worst = 0.0;
    for (const auto& [key, value] : T.B) {
        const double overlap = value / multiplicity(key[0], key[1], key[2]);
        for (int swap = 0; swap < 3; ++swap) {
            std::array<int, 4> q = key;
            std::swap(q[swap], q[3]);
            std::array<int, 3> j{q[0], q[1], q[2]};
            std::sort(j.rbegin(), j.rend());
            const double other = T.entry(j[0], j[1], j[2], q[3]) / multiplicity(j[0], j[1], j[2]);
            worst = std::max(worst, std::abs(other - overlap) / std::abs(overlap));
        }
    }
    report("tensor permutation symmetry", worst < 1e-12, "max relative asymmetry = " + sci(worst));
}

}  // namespace

int main() {
    const PlateConfig tnb = PlateConfig::tnb();
    const PlateConfig second{pi / 144.0, 0.25, pi / 1500.0};
    const ModeBasis basis = make_basis(tnb);
    const GalerkinTensor T = compute_galerkin_tensor(basis);

    orthogonality(basis);
    rayleigh({tnb, second});
    ordering({tnb, second});
    gradient(basis, T);
    tensor_symmetry(T);
    monodromy_determinant(basis);
    period_monotonicity(basis);
    amplitude_round_trip(basis);

    std::printf("%s: %d failure(s)\n", g_failures == 0 ? "ALL PASS" : "FAILED", g_failures);
    return g_failures == 0 ? 0 : 1;
}
