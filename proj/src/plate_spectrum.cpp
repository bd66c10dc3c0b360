#include "flutter/plate_spectrum.hpp"

#include "flutter/errors.hpp"
#include "flutter/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flutter {

using numerics::pi;

PlateConfig PlateConfig::tnb() { return PlateConfig{pi / 150.0, 0.2, pi / 1500.0}; }

void PlateConfig::validate() const {
    if (!(poisson > 0.0 && poisson < 0.5)) {
        throw DomainError("plate: poisson ratio must lie in (0, 1/2)");
    }
    if (!(half_width > 0.0 && std::isfinite(half_width))) {
        throw DomainError("plate: half_width must be positive");
    }
    if (!(strip_width > 0.0 && strip_width < half_width)) {
        throw DomainError("plate: strip_width must lie in (0, half_width)");
    }
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::Mu1: return "Mu1";
        case Branch::MuK: return "MuK";
        case Branch::Nu1: return "Nu1";
        case Branch::NuK: return "NuK";
    }
    return "?";
}

Parity parity_of(Branch b) {
    return (b == Branch::Mu1 || b == Branch::MuK) ? Parity::Even : Parity::Odd;
}

ModeKind kind_of(Branch b) {
    return parity_of(b) == Parity::Even ? ModeKind::Longitudinal : ModeKind::Torsional;
}

double Eigenpair::sqrt_lambda() const { return std::sqrt(lambda); }

std::string Eigenpair::label() const {
    std::ostringstream os;
    os << (parity == Parity::Even ? "mu" : "nu") << "_{" << m << "," << k << "}";
    return os.str();
}

namespace {

void check_m(int m) {
    if (m < 1) throw DomainError("plate: wavenumber m must be >= 1");
}

// Residuals written in q = sqrt(lambda); mm = m^2, c = 1 - sigma.

double res_mu1_q(double q, double mm, const PlateConfig& cfg) {
    const double c = 1.0 - cfg.poisson;
    const double l = cfg.half_width;
    const double sm = std::sqrt(std::max(mm - q, 0.0));
    const double sp = std::sqrt(mm + q);
    const double gp = q + c * mm;
    const double gm = q - c * mm;
    return sm * gp * gp * std::tanh(l * sm) - sp * gm * gm * std::tanh(l * sp);
}

double res_nu1_q(double q, double mm, const PlateConfig& cfg) {
    const double c = 1.0 - cfg.poisson;
    const double l = cfg.half_width;
    const double sm = std::sqrt(std::max(mm - q, 0.0));
    const double sp = std::sqrt(mm + q);
    const double gp = q + c * mm;
    const double gm = q - c * mm;
    return sm * gp * gp * std::tanh(l * sp) - sp * gm * gm * std::tanh(l * sm);
}

// Oscillatory branches take s = sqrt(q - m^2) directly.
double res_muk_s(double s, double mm, const PlateConfig& cfg) {
    const double c = 1.0 - cfg.poisson;
    const double l = cfg.half_width;
    const double q = mm + s * s;
    const double sp = std::sqrt(q + mm);
    const double gp = q + c * mm;
    const double gm = q - c * mm;
    return s * gp * gp * std::tan(l * s) + sp * gm * gm * std::tanh(l * sp);
}

double res_muk_q(double q, double mm, const PlateConfig& cfg) {
    return res_muk_s(std::sqrt(std::max(q - mm, 0.0)), mm, cfg);
}

double res_nuk_s(double s, double mm, const PlateConfig& cfg) {
    const double c = 1.0 - cfg.poisson;
    const double l = cfg.half_width;
    const double q = mm + s * s;
    const double sp = std::sqrt(q + mm);
    const double gp = q + c * mm;
    const double gm = q - c * mm;
    return s * gp * gp * std::tanh(l * sp) - sp * gm * gm * std::tan(l * s);
}

double res_nuk_q(double q, double mm, const PlateConfig& cfg) {
    return res_nuk_s(std::sqrt(std::max(q - mm, 0.0)), mm, cfg);
}


constexpr double kRootRelTol = 2e-13;  // in q, i.e. 4e-13 in lambda
constexpr double kBracketShrink = 1e-9;

// Bracket j of the oscillatory branches in s = sqrt(q - m^2):
// j = 0 is (0, pi/(2l)), j >= 1 is ((j - 1/2) pi/l, (j + 1/2) pi/l).
// Both ends are pulled inward slightly, away from the poles of tan and from
// the trivial zero at s = 0.
std::pair<double, double> oscillatory_bracket(int j, double l) {
    const double lo = j == 0 ? 0.0 : (j - 0.5) * pi / l;
    const double hi = (j + 0.5) * pi / l;
    const double w = hi - lo;
    return {lo + kBracketShrink * w, hi - kBracketShrink * w};
}

// Root of an oscillatory branch inside bracket j, as q, if the residual
// changes sign there.
std::optional<double> oscillatory_root(Branch b, int m, int j, const PlateConfig& cfg) {
    const double mm = double(m) * m;
    const auto [slo, shi] = oscillatory_bracket(j, cfg.half_width);
    // Solved in s so that q - m^2 keeps full precision near the lower end.
    auto f = [&](double s) {
        return b == Branch::MuK ? res_muk_s(s, mm, cfg) : res_nuk_s(s, mm, cfg);
    };
    const double flo = f(slo);
    const double fhi = f(shi);
    if (std::signbit(flo) == std::signbit(fhi)) return std::nullopt;
    const double s = numerics::find_root_bracketed(f, slo, shi, kRootRelTol);
    return mm + s * s;
}

double lambda_lower_of_bracket(int m, int j, double l) {
    const double s = oscillatory_bracket(j, l).first;
    const double q = double(m) * m + s * s;
    return q * q;
}

double solve_mu1_q(int m, const PlateConfig& cfg) {
    const double mm = double(m) * m;
    const double c = 1.0 - cfg.poisson;
    auto f = [&](double q) { return res_mu1_q(q, mm, cfg); };
    return numerics::find_root_bracketed(f, c * mm, mm, kRootRelTol);
}

double solve_nu1_q(int m, const PlateConfig& cfg) {
    const double mm = double(m) * m;
    const double c = 1.0 - cfg.poisson;
    auto f = [&](double q) { return res_nu1_q(q, mm, cfg); };
    return numerics::find_root_bracketed(f, c * mm, mm * (1.0 - 1e-10), kRootRelTol);
}

Eigenpair make_pair(Branch b, int m, int k, double q) {
    return Eigenpair{b, m, k, q * q, parity_of(b)};
}

}  // namespace

double residual_mu1(double lambda, int m, const PlateConfig& cfg) {
    check_m(m);
    const double mm = double(m) * m;
    if (!(lambda > 0.0 && lambda <= mm * mm)) {
        throw DomainError("residual_mu1: lambda must lie in (0, m^4]");
    }
    return res_mu1_q(std::sqrt(lambda), mm, cfg);
}

double residual_nu1(double lambda, int m, const PlateConfig& cfg) {
    check_m(m);
    const double mm = double(m) * m;
    if (!(lambda > 0.0 && lambda <= mm * mm)) {
        throw DomainError("residual_nu1: lambda must lie in (0, m^4]");
    }
    return res_nu1_q(std::sqrt(lambda), mm, cfg);
}

double residual_muk(double lambda, int m, const PlateConfig& cfg) {
    check_m(m);
    const double mm = double(m) * m;
    if (!(lambda >= mm * mm)) throw DomainError("residual_muk: lambda must be >= m^4");
    return res_muk_q(std::sqrt(lambda), mm, cfg);
}

double residual_nuk(double lambda, int m, const PlateConfig& cfg) {
    check_m(m);
    const double mm = double(m) * m;
    if (!(lambda >= mm * mm)) throw DomainError("residual_nuk: lambda must be >= m^4");
    return res_nuk_q(std::sqrt(lambda), mm, cfg);
}

double residual(Branch b, double lambda, int m, const PlateConfig& cfg) {
    switch (b) {
        case Branch::Mu1: return residual_mu1(lambda, m, cfg);
        case Branch::MuK: return residual_muk(lambda, m, cfg);
        case Branch::Nu1: return residual_nu1(lambda, m, cfg);
        case Branch::NuK: return residual_nuk(lambda, m, cfg);
    }
    return 0.0;
}

bool nu1_exists(int m, const PlateConfig& cfg) {
    check_m(m);
    const double x = cfg.half_width * m * std::sqrt(2.0);
    const double r = (2.0 - cfg.poisson) / cfg.poisson;
    return x / std::tanh(x) > r * r;
}

Eigenpair solve_branch(Branch b, int m, int k, const PlateConfig& cfg) {
    cfg.validate();
    check_m(m);
    switch (b) {
        case Branch::Mu1:
            if (k != 1) throw DomainError("solve_branch: Mu1 requires k = 1");
            return make_pair(b, m, 1, solve_mu1_q(m, cfg));
        case Branch::Nu1: {
            if (k != 1) throw DomainError("solve_branch: Nu1 requires k = 1");
            if (!nu1_exists(m, cfg)) {
                std::ostringstream msg;
                msg << "Nu1 branch has no root for m=" << m;
                throw NoRoot(msg.str());
            }
            return make_pair(b, m, 1, solve_nu1_q(m, cfg));
        }
        case Branch::MuK:
        case Branch::NuK: {
            if (k < 2) throw DomainError("solve_branch: MuK/NuK require k >= 2");
            int found = 0;
            // Each bracket holds at most one root; the j = 0 bracket may hold none.
            for (int j = 0; j <= k + 1; ++j) {
                if (auto q = oscillatory_root(b, m, j, cfg)) {
                    if (++found == k - 1) return make_pair(b, m, k, *q);
                }
            }
            std::ostringstream msg;
            msg << to_string(b) << " root k=" << k << " for m=" << m
                << " not found in the expected brackets";
            throw BracketFailure(msg.str());
        }
    }
    throw DomainError("solve_branch: unknown branch");
}

std::vector<Eigenpair> enumerate_spectrum(int n, const PlateConfig& cfg) {
    cfg.validate();
    if (n < 1) throw DomainError("enumerate_spectrum: n must be >= 1");

    // mu_{1,1}..mu_{n,1} are n distinct eigenvalues, so the largest of them
    // bounds lambda_n from above. Every eigenvalue with wavenumber m exceeds
    // (1-sigma)^2 m^4, which bounds the wavenumbers that can contribute.
    double cutoff = 0.0;
    for (int m = 1; m <= n; ++m) cutoff = std::max(cutoff, std::pow(solve_mu1_q(m, cfg), 2));

    const double c2 = std::pow(1.0 - cfg.poisson, 2);
    std::vector<Eigenpair> all;
    for (int m = 1; c2 * std::pow(double(m), 4) < cutoff; ++m) {
        const Eigenpair mu1 = make_pair(Branch::Mu1, m, 1, solve_mu1_q(m, cfg));
        if (mu1.lambda <= cutoff) all.push_back(mu1);
        if (nu1_exists(m, cfg)) {
            const Eigenpair nu1 = make_pair(Branch::Nu1, m, 1, solve_nu1_q(m, cfg));
            if (nu1.lambda <= cutoff) all.push_back(nu1);
        }
        for (Branch b : {Branch::MuK, Branch::NuK}) {
            int k = 1;
            for (int j = 0; lambda_lower_of_bracket(m, j, cfg.half_width) <= cutoff; ++j) {
                if (auto q = oscillatory_root(b, m, j, cfg)) {
                    ++k;
                    if (*q * *q <= cutoff) all.push_back(make_pair(b, m, k, *q));
                }
            }
        }
    }
    std::sort(all.begin(), all.end(),
              [](const Eigenpair& a, const Eigenpair& b) { return a.lambda < b.lambda; });
    if (int(all.size()) > n) all.resize(n);
    return all;
}

std::optional<int> exceptional_wavenumber(const PlateConfig& cfg, int s_max) {
    const double r = std::pow(cfg.poisson / (2.0 - cfg.poisson), 2);
    for (int s = 1; s <= s_max; ++s) {
        const double x = std::sqrt(2.0) * s * cfg.half_width;
        if (std::abs(std::tanh(x) - r * x) < 1e-12) return s;
    }
    return std::nullopt;
}

namespace {

// f(a)/g(b) for f, g in {cosh, sinh}, in exp-difference form.
double hyp_ratio(bool num_sinh, double a, bool den_sinh, double b) {
    const double sa = num_sinh && a < 0.0 ? -1.0 : 1.0;
    const double sb = den_sinh && b < 0.0 ? -1.0 : 1.0;
    a = std::abs(a);
    b = std::abs(b);
    const double na = num_sinh ? -std::expm1(-2.0 * a) : 1.0 + std::exp(-2.0 * a);
    const double db = den_sinh ? -std::expm1(-2.0 * b) : 1.0 + std::exp(-2.0 * b);
    return sa * sb * std::exp(a - b) * na / db;
}

// d^n/dy^n [f(r y)] / f(r l) with f = cosh (even) or sinh (odd).
double hyp_term(bool odd, double r, double y, double l, int n) {
    const bool num_sinh = odd != (n % 2 == 1);
    return std::pow(r, n) * hyp_ratio(num_sinh, r * y, odd, r * l);
}

// d^n/dy^n [g(s y)] / g(s l) with g = cos (even) or sin (odd).
double trig_term(bool odd, double s, double y, double l, int n) {
    // Derivative cycle of cos: cos, -sin, -cos, sin; of sin: sin, cos, -sin, -cos.
    const int phase = (n + (odd ? 3 : 0)) % 4;
    const double sy = s * y;
    double v = 0.0;
    switch (phase) {
        case 0: v = std::cos(sy); break;
        case 1: v = -std::sin(sy); break;
        case 2: v = -std::cos(sy); break;
        case 3: v = std::sin(sy); break;
    }
    const double den = odd ? std::sin(s * l) : std::cos(s * l);
    return std::pow(s, n) * v / den;
}

}  // namespace

double eval_profile_derivative(const ModeProfile& p, double y, int order) {
    if (order < 0 || order > 4) throw DomainError("eval_profile_derivative: order must be 0..4");
    const double l = p.half_width;
    const double rp = std::sqrt(p.beta_plus);
    const double rm = std::sqrt(p.beta_minus);
    const bool odd = p.pair.parity == Parity::Odd;
    const double first = p.coef_plus * hyp_term(odd, rp, y, l, order);
    double second = 0.0;
    switch (p.pair.branch) {
        case Branch::Mu1:
        case Branch::Nu1: second = hyp_term(odd, rm, y, l, order); break;
        case Branch::MuK:
        case Branch::NuK: second = trig_term(odd, rm, y, l, order); break;
    }
    return first + p.coef_minus * second;
}

double eval_profile(const ModeProfile& p, double y) { return eval_profile_derivative(p, y, 0); }

double profile_norm_squared(const ModeProfile& p) {
    auto sq = [&](double y) {
        const double v = eval_profile(p, y);
        return v * v;
    };
    return pi * numerics::integrate_scaled(sq, 0.0, p.half_width);
}

ModeProfile make_profile(const Eigenpair& pair, const PlateConfig& cfg) {
    ModeProfile p{};
    p.pair = pair;
    p.kind = kind_of(pair.branch);
    p.half_width = cfg.half_width;
    p.q = std::sqrt(pair.lambda);
    const double mm = double(pair.m) * pair.m;
    const double c = 1.0 - cfg.poisson;
    p.beta_plus = mm + p.q;
    p.beta_minus = std::abs(mm - p.q);
    p.coef_plus = p.q - c * mm;
    p.coef_minus = p.q + c * mm;
    p.omega = std::sqrt(profile_norm_squared(p));
    return p;
}

const ModeProfile& ModeBasis::mode(int index) const {
    if (index < 1 || index > kModes) throw DomainError("ModeBasis: index must be 1..16");
    return index <= kLongitudinal ? longitudinal[index - 1]
                                  : torsional[index - kLongitudinal - 1];
}

int ModeBasis::wavenumber(int index) const { return mode(index).m(); }

ModeBasis make_basis(const PlateConfig& cfg) {
    cfg.validate();
    ModeBasis basis{cfg, {}, {}};
    for (int m = 1; m <= ModeBasis::kLongitudinal; ++m) {
        basis.longitudinal.push_back(make_profile(solve_branch(Branch::Mu1, m, 1, cfg), cfg));
    }
    for (int m = 1; m <= ModeBasis::kTorsional; ++m) {
        basis.torsional.push_back(make_profile(solve_branch(Branch::NuK, m, 2, cfg), cfg));
    }
    return basis;
}

double sup_norm_mode(int index, const ModeBasis& basis) {
    const ModeProfile& p = basis.mode(index);
    const double l = p.half_width;
    auto g = [&](double y) { return std::abs(eval_profile(p, y)); };

    constexpr int samples = 512;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i <= samples; ++i) {
        const double v = g(l * i / samples);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    // Golden-section refinement on the neighbouring sample cells.
    double a = l * std::max(best - 1, 0) / samples;
    double b = l * std::min(best + 1, samples) / samples;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 100 && b - a > 1e-15 * l; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        }
    }
    best_val = std::max({best_val, f1, f2});
    return best_val / p.omega;
}

}  // namespace flutter
