#pragma once

// Eigenvalues and eigenfunctions of the hinged-free plate
// (0, pi) x (-l, l). Every eigenfunction separates as profile(y) * sin(m x);
// each branch of the spectrum is the root set of one transcendental equation
// in q = sqrt(lambda).

#include <optional>
#include <string>
#include <vector>

namespace flutter {

struct PlateConfig {
    double half_width;   // l
    double poisson;      // sigma
    double strip_width;  // epsilon, width of each hanger strip

    static PlateConfig tnb();

    /// l - epsilon, the inner edge of the hanger strip.
    double strip_inner() const { return half_width - strip_width; }

    /// Throws DomainError unless 0 < sigma < 1/2 and 0 < epsilon < l.
    void validate() const;
};

enum class Branch { Mu1, MuK, Nu1, NuK };
enum class Parity { Even, Odd };
enum class ModeKind { Longitudinal, Torsional };

std::string to_string(Branch b);
Parity parity_of(Branch b);
ModeKind kind_of(Branch b);

struct Eigenpair {
    Branch branch;
    int m;  // longitudinal wavenumber
    int k;  // transverse index, 1 for Mu1 and Nu1
    double lambda;
    Parity parity;

    double sqrt_lambda() const;
    /// "mu_{m,k}" or "nu_{m,k}".
    std::string label() const;
};

// Characteristic-equation residuals (left side minus right side). Arguments
// outside the region where all square roots are real raise DomainError.
double residual_mu1(double lambda, int m, const PlateConfig& cfg);
double residual_muk(double lambda, int m, const PlateConfig& cfg);
double residual_nu1(double lambda, int m, const PlateConfig& cfg);
double residual_nuk(double lambda, int m, const PlateConfig& cfg);
double residual(Branch b, double lambda, int m, const PlateConfig& cfg);

/// Whether the odd branch below m^4 exists for wavenumber m.
bool nu1_exists(int m, const PlateConfig& cfg);

/// Solves one branch equation to relative accuracy 1e-12 in lambda.
///
/// For MuK/NuK the roots above m^4 are collected bracket by bracket between
/// consecutive poles of tan(l sqrt(q - m^2)); k selects the (k-1)-th of them.
/// Throws NoRoot (Nu1 absent) or BracketFailure.
Eigenpair solve_branch(Branch b, int m, int k, const PlateConfig& cfg);

/// The n smallest eigenvalues over all branches, ascending.
std::vector<Eigenpair> enumerate_spectrum(int n, const PlateConfig& cfg);

/// Integer s in [1, s_max] at which the exceptional extra eigenvalue would
/// appear, if any. Such an eigenvalue is reported, never solved for.
std::optional<int> exceptional_wavenumber(const PlateConfig& cfg, int s_max);

/// Transverse profile of one eigenfunction together with its L2 norm.
struct ModeProfile {
    Eigenpair pair;
    ModeKind kind;
    double half_width;
    double q;           // sqrt(lambda)
    double beta_plus;   // m^2 + q
    double beta_minus;  // |m^2 - q|
    double coef_plus;   // q - (1 - sigma) m^2, multiplies the (m^2 + q) term
    double coef_minus;  // q + (1 - sigma) m^2
    double omega;       // omega^2 = pi * int_0^l profile^2 dy

    int m() const { return pair.m; }
};

ModeProfile make_profile(const Eigenpair& pair, const PlateConfig& cfg);

/// Value of the unnormalized profile at |y| <= l.
double eval_profile(const ModeProfile& p, double y);

/// d^order/dy^order of the unnormalized profile, order in {0, 1, 2, 3, 4}.
double eval_profile_derivative(const ModeProfile& p, double y, int order);

/// pi * int_0^l profile^2 dy.
double profile_norm_squared(const ModeProfile& p);

/// Fourteen longitudinal modes mu_{m,1} (m = 1..14) and the torsional modes
/// nu_{1,2}, nu_{2,2}. Index 1..16 follows that order.
struct ModeBasis {
    PlateConfig cfg;
    std::vector<ModeProfile> longitudinal;
    std::vector<ModeProfile> torsional;

    static constexpr int kLongitudinal = 14;
    static constexpr int kTorsional = 2;
    static constexpr int kModes = kLongitudinal + kTorsional;

    const ModeProfile& mode(int index) const;
    /// x-wavenumber of basis index 1..16.
    int wavenumber(int index) const;
    bool is_torsional(int index) const { return index > kLongitudinal; }
};

ModeBasis make_basis(const PlateConfig& cfg);

/// Sup norm over the plate of the L2-normalized eigenfunction of basis
/// index 1..16.
double sup_norm_mode(int index, const ModeBasis& basis);

}  // namespace flutter
