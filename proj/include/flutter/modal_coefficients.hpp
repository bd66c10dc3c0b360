#pragma once

// Strip-overlap coefficients of the modal reduction and the quartic tensor of
// the coupled 16-mode system. The hanger strip is {l - epsilon < |y| < l};
// its characteristic function weights every overlap integral.

#include "flutter/plate_spectrum.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace flutter {

inline constexpr int kLong = ModeBasis::kLongitudinal;
inline constexpr int kTors = ModeBasis::kTorsional;

struct ModalCoefficients {
    double gamma = 0.0;
    std::array<double, kLong> mu{};   // mu_{k,1}
    std::array<double, kTors> nu{};   // nu_{l,2}
    std::array<double, kLong> a{};
    std::array<double, kLong> b{};
    std::array<double, kTors> a_bar{};
    std::array<std::array<double, kLong>, kTors> d{};  // d[l-1][k-1]
    std::array<double, kLong> rho{};    // gamma mu_k + a_k
    std::array<double, kTors> delta{};  // gamma nu_l + a_bar_l

    double rho_k(int k) const { return rho.at(k - 1); }
    double b_k(int k) const { return b.at(k - 1); }
    double delta_l(int l) const { return delta.at(l - 1); }
    double d_lk(int l, int k) const { return d.at(l - 1).at(k - 1); }
};

/// a_k = pi/omega_k^2 int_strip v_k^2 and b_k = 3 pi/(4 omega_k^4) int_strip v_k^4.
std::pair<std::array<double, kLong>, std::array<double, kLong>> compute_ak_bk(
    const ModeBasis& basis);

/// a_bar_l = pi/omega_l^2 int_strip theta_l^2 and
/// d_{l,k} = c/(omega_k^2 omega_l^2) int_strip v_k^2 theta_l^2 with c = 9 pi/4
/// when the x-wavenumbers of k and l coincide, 3 pi/2 otherwise.
std::pair<std::array<double, kTors>, std::array<std::array<double, kLong>, kTors>>
compute_abar_dlk(const ModeBasis& basis);

/// All scalar coefficients for stiffness parameter gamma.
ModalCoefficients compute_coefficients(const ModeBasis& basis, double gamma);

/// Throws DomainError unless every coefficient satisfies its sign and range
/// constraints (0 < a_k < 1, 0 < a_bar_l < 1, b_k > 0, d_{l,k} > 0).
void validate_coefficients(const ModalCoefficients& c);

/// Exact value of int_0^pi sin(m1 x) sin(m2 x) sin(m3 x) sin(m4 x) dx.
double sine_quartic_integral(int m1, int m2, int m3, int m4);

/// Number of distinct orderings of (j1, j2, j3): 1, 3 or 6.
int multiplicity(int j1, int j2, int j3);

using TensorKey = std::array<int, 4>;  // j1 >= j2 >= j3, then k; indices 1..16

struct GalerkinTensor {
    std::array<double, ModeBasis::kModes> A{};
    std::map<TensorKey, double> B;  // multiplicity folded in

    double entry(int j1, int j2, int j3, int k) const;
    std::size_t nonzeros() const { return B.size(); }
};

/// Builds A and every nonzero B entry. The x-factor is exact; entries whose
/// x-factor vanishes or whose y-integrand is odd are never stored.
GalerkinTensor compute_galerkin_tensor(const ModeBasis& basis);

/// Unweighted overlap int_Omega Upsilon w_{i1} w_{i2} w_{i3} w_{i4} of
/// normalized basis functions.
double strip_overlap(const ModeBasis& basis, int i1, int i2, int i3, int i4);

/// Whether the modes in kset (1 to 3 distinct indices) jointly influence
/// mode j through the tensor.
bool influences(const std::vector<int>& kset, int j, const GalerkinTensor& T);

/// Smallest set containing start and closed under influence by any one, two
/// or three of its members.
std::set<int> influence_closure(const std::set<int>& start, const GalerkinTensor& T);

/// "j1 j2 j3 k value" per line, lexicographic key order, 17 significant digits.
void write_tensor(std::ostream& os, const GalerkinTensor& T);
/// Reads B entries written by write_tensor; '#' lines are skipped.
GalerkinTensor read_tensor(std::istream& is, const std::array<double, ModeBasis::kModes>& A);

/// Rows "k,a_k,b_k,d_1k,d_2k" for k = 1..14.
void write_coefficients_csv(std::ostream& os, const ModalCoefficients& c);

}  // namespace flutter
