#include "flutter/errors.hpp"
#include "flutter/numerics.hpp"
#include "flutter/plate_spectrum.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace flutter {
namespace {

using numerics::pi;

PlateConfig narrow_plate_config() { return PlateConfig{pi / 144.0, 0.25, pi / 1500.0}; }

const ModeBasis& tnb_basis() {
    static const ModeBasis basis = make_basis(PlateConfig::tnb());
    return basis;
}

TEST(PlateConfig, DefaultsAndValidation) {
    const PlateConfig c = PlateConfig::tnb();
    EXPECT_DOUBLE_EQ(c.half_width, pi / 150.0);
    EXPECT_DOUBLE_EQ(c.poisson, 0.2);
    EXPECT_DOUBLE_EQ(c.strip_width, pi / 1500.0);
    EXPECT_DOUBLE_EQ(c.strip_inner(), c.half_width - c.strip_width);
    EXPECT_NO_THROW(c.validate());
    EXPECT_THROW((PlateConfig{pi / 150.0, 0.5, pi / 1500.0}.validate()), DomainError);
    EXPECT_THROW((PlateConfig{pi / 150.0, 0.0, pi / 1500.0}.validate()), DomainError);
    EXPECT_THROW((PlateConfig{pi / 150.0, 0.2, pi / 150.0}.validate()), DomainError);
    EXPECT_THROW((PlateConfig{-1.0, 0.2, 0.001}.validate()), DomainError);
}

TEST(Residuals, Mu1ChangesSignAcrossItsWindow) {
    const PlateConfig c = PlateConfig::tnb();
    for (int m = 1; m <= 14; ++m) {
        const double m4 = std::pow(m, 4);
        const double lo = std::pow(1.0 - c.poisson, 2) * m4 * 1.0001;
        const double hi = 0.9999 * m4;
        EXPECT_LT(residual_mu1(lo, m, c) * residual_mu1(hi, m, c), 0.0) << "m = " << m;
    }
}

TEST(Residuals, Mu1RejectsArgumentsOutsideWindow) {
    const PlateConfig c = PlateConfig::tnb();
    EXPECT_THROW(residual_mu1(1.5, 1, c), DomainError);
    EXPECT_THROW(residual_mu1(0.0, 1, c), DomainError);
    EXPECT_THROW(residual_mu1(-0.5, 1, c), DomainError);
}

TEST(Residuals, VanishAtSolvedEigenvalues) {
    const PlateConfig c = PlateConfig::tnb();
    const Eigenpair p = solve_branch(Branch::Mu1, 1, 1, c);
    const double scale = std::abs(residual_mu1(0.9999, 1, c));
    EXPECT_LT(std::abs(residual_mu1(p.lambda, 1, c)), 1e-8 * scale);
    EXPECT_NEAR(p.sqrt_lambda(), 0.98, 0.005);
}

TEST(SolveBranch, TorsionalEigenvaluesOfBothConfigurations) {
    EXPECT_NEAR(solve_branch(Branch::NuK, 1, 2, PlateConfig::tnb()).sqrt_lambda(), 104.61, 0.01);
    EXPECT_NEAR(solve_branch(Branch::NuK, 2, 2, PlateConfig::tnb()).sqrt_lambda(), 209.25, 0.01);
    EXPECT_NEAR(solve_branch(Branch::NuK, 1, 2, narrow_plate_config()).sqrt_lambda(), 97.24, 0.01);
}

TEST(SolveBranch, Nu1AbsentForSmallWavenumbers) {
    const PlateConfig c = PlateConfig::tnb();
    const double s = c.half_width * std::sqrt(2.0);
    EXPECT_LT(s / std::tanh(s), std::pow((2.0 - c.poisson) / c.poisson, 2));
    EXPECT_FALSE(nu1_exists(1, c));
    EXPECT_THROW(solve_branch(Branch::Nu1, 1, 1, c), NoRoot);
}

TEST(SolveBranch, BranchWindowsAndParity) {
    const PlateConfig c = PlateConfig::tnb();
    for (int m = 1; m <= 6; ++m) {
        const double m4 = std::pow(m, 4);
        const Eigenpair mu1 = solve_branch(Branch::Mu1, m, 1, c);
        EXPECT_GT(mu1.lambda, std::pow(1.0 - c.poisson, 2) * m4);
        EXPECT_LT(mu1.lambda, m4);
        EXPECT_EQ(mu1.parity, Parity::Even);
        for (int k = 2; k <= 3; ++k) {
            const Eigenpair muk = solve_branch(Branch::MuK, m, k, c);
            const Eigenpair nuk = solve_branch(Branch::NuK, m, k, c);
            EXPECT_GT(muk.lambda, m4);
            EXPECT_GT(nuk.lambda, m4);
            EXPECT_EQ(muk.parity, Parity::Even);
            EXPECT_EQ(nuk.parity, Parity::Odd);
        }
        EXPECT_LT(solve_branch(Branch::MuK, m, 2, c).lambda, solve_branch(Branch::MuK, m, 3, c).lambda);
    }
}

TEST(EnumerateSpectrum, KindPatternOfDefaultPlate) {
    const auto s = enumerate_spectrum(16, PlateConfig::tnb());
    ASSERT_EQ(s.size(), 16u);
    for (int i = 0; i < 16; ++i) {
        if (i == 10 || i == 15) {
            EXPECT_EQ(s[i].branch, Branch::NuK) << i;
            EXPECT_EQ(s[i].m, i == 10 ? 1 : 2);
            EXPECT_EQ(s[i].k, 2);
        } else {
            EXPECT_EQ(s[i].branch, Branch::Mu1) << i;
        }
        if (i > 0) {
            EXPECT_LT(s[i - 1].lambda, s[i].lambda);
        }
    }
    EXPECT_EQ(s[10].label(), "nu_{1,2}");
    EXPECT_EQ(s[0].label(), "mu_{1,1}");
}

TEST(EnumerateSpectrum, SingleValueIsFirstLongitudinalMode) {
    const auto s = enumerate_spectrum(1, PlateConfig::tnb());
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].branch, Branch::Mu1);
    EXPECT_EQ(s[0].m, 1);
}

TEST(EnumerateSpectrum, SixteenthValueOfSecondConfiguration) {
    const auto s = enumerate_spectrum(16, narrow_plate_config());
    EXPECT_NEAR(s[15].sqrt_lambda(), 194.51, 0.01);
    EXPECT_EQ(s[15].branch, Branch::NuK);
}

TEST(EnumerateSpectrum, PrefixIsStableUnderLargerRequests) {
    const auto a = enumerate_spectrum(16, PlateConfig::tnb());
    const auto b = enumerate_spectrum(30, PlateConfig::tnb());
    for (int i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(a[i].lambda, b[i].lambda);
}

TEST(ExceptionalEigenvalue, NoneForDefaultPlate) {
    EXPECT_FALSE(exceptional_wavenumber(PlateConfig::tnb(), 1000).has_value());
}

TEST(Profiles, ParityOfLongitudinalAndTorsionalModes) {
    const ModeBasis& b = tnb_basis();
    const double l = b.cfg.half_width;
    for (int i = 1; i <= ModeBasis::kModes; ++i) {
        const ModeProfile& p = b.mode(i);
        for (double y : {0.1 * l, 0.5 * l, 0.93 * l, l}) {
            if (b.is_torsional(i)) {
                EXPECT_DOUBLE_EQ(eval_profile(p, -y), -eval_profile(p, y));
            } else {
                EXPECT_DOUBLE_EQ(eval_profile(p, -y), eval_profile(p, y));
            }
        }
        if (b.is_torsional(i)) {
            EXPECT_EQ(eval_profile(p, 0.0), 0.0);
        }
    }
}

TEST(Profiles, NormMatchesIndependentQuadrature) {
    const ModeBasis& b = tnb_basis();
    const auto rule = oracle::gauss_legendre(20);
    for (int i = 1; i <= ModeBasis::kModes; ++i) {
        const ModeProfile& p = b.mode(i);
        const double ref =
            pi * oracle::gauss_integrate([&](double y) { return std::pow(eval_profile(p, y), 2); }, 0.0,
                                         b.cfg.half_width, 4, rule);
        EXPECT_NEAR(profile_norm_squared(p), ref, 1e-10 * ref) << i;
        EXPECT_NEAR(p.omega * p.omega, ref, 1e-10 * ref) << i;
    }
}

TEST(Profiles, DerivativesMatchFiniteDifferences) {
    const ModeBasis& b = tnb_basis();
    const double l = b.cfg.half_width;
    for (int i : {1, 7, 14, 15, 16}) {
        const ModeProfile& p = b.mode(i);
        for (double y : {0.2 * l, 0.6 * l}) {
            const double h = 1e-4 * l;
            for (int order = 1; order <= 4; ++order) {
                const double fd = (eval_profile_derivative(p, y + h, order - 1) -
                                   eval_profile_derivative(p, y - h, order - 1)) /
                                  (2.0 * h);
                const double exact = eval_profile_derivative(p, y, order);
                const double scale = std::abs(eval_profile_derivative(p, l, order)) +
                                     std::abs(eval_profile_derivative(p, y, order - 1)) / l;
                EXPECT_NEAR(fd, exact, 1e-5 * scale) << "mode " << i << " order " << order;
            }
        }
    }
}

TEST(Profiles, SatisfyOdeAndFreeEdgeConditions) {
    const ModeBasis& b = tnb_basis();
    const double l = b.cfg.half_width;
    const double sigma = b.cfg.poisson;
    for (int i = 1; i <= ModeBasis::kModes; ++i) {
        const ModeProfile& p = b.mode(i);
        const double m2 = double(p.m()) * p.m();
        auto d = [&](double y, int order) { return eval_profile_derivative(p, y, order); };
        for (double y : {0.0, 0.3 * l, 0.9 * l, l}) {
            const double lhs = d(y, 4) - 2.0 * m2 * d(y, 2) + m2 * m2 * d(y, 0);
            const double scale = std::abs(d(y, 4)) + 2.0 * m2 * std::abs(d(y, 2)) +
                                 p.pair.lambda * std::abs(d(y, 0)) + 1e-300;
            EXPECT_NEAR(lhs, p.pair.lambda * d(y, 0), 1e-9 * scale) << "mode " << i;
        }
        const double bc2 = d(l, 2) - sigma * m2 * d(l, 0);
        const double bc3 = d(l, 3) - (2.0 - sigma) * m2 * d(l, 1);
        EXPECT_NEAR(bc2, 0.0, 1e-9 * (std::abs(d(l, 2)) + sigma * m2 * std::abs(d(l, 0)))) << i;
        EXPECT_NEAR(bc3, 0.0, 1e-9 * (std::abs(d(l, 3)) + (2.0 - sigma) * m2 * std::abs(d(l, 1)))) << i;
    }
}

TEST(ModeBasis, OrderAndWavenumbers) {
    const ModeBasis& b = tnb_basis();
    for (int i = 1; i <= 14; ++i) {
        EXPECT_EQ(b.wavenumber(i), i);
        EXPECT_EQ(b.mode(i).kind, ModeKind::Longitudinal);
    }
    EXPECT_EQ(b.wavenumber(15), 1);
    EXPECT_EQ(b.wavenumber(16), 2);
    EXPECT_EQ(b.mode(15).kind, ModeKind::Torsional);
    EXPECT_EQ(b.mode(16).pair.label(), "nu_{2,2}");
}

TEST(SupNorm, EndpointsAndLowerBound) {
    const ModeBasis& b = tnb_basis();
    EXPECT_NEAR(sup_norm_mode(1, b), 3.897, 0.005);
    EXPECT_NEAR(sup_norm_mode(14, b), 3.920, 0.005);
    const double area = pi * 2.0 * b.cfg.half_width;
    for (int k = 1; k <= ModeBasis::kModes; ++k) EXPECT_GE(sup_norm_mode(k, b), 1.0 / std::sqrt(area));
}

TEST(SupNorm, AgreesWithDenseSampling) {
    const ModeBasis& b = tnb_basis();
    for (int k : {1, 8, 14}) {
        double best = 0.0;
        const double l = b.cfg.half_width;
        for (int i = 0; i <= 1000; ++i) {
            best = std::max(best, std::abs(oracle::basis_function(b, k, 0.5 * pi / k, l * i / 1000.0)));
        }
        EXPECT_GE(sup_norm_mode(k, b), best * (1.0 - 1e-12)) << k;
        EXPECT_NEAR(sup_norm_mode(k, b), best, 1e-6 * best) << k;
    }
}

}  // namespace
}  // namespace flutter
