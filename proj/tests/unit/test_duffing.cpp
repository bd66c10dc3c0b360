#include "flutter/duffing.hpp"
#include "flutter/errors.hpp"
#include "flutter/numerics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace flutter {
namespace {

using numerics::pi;

// Coefficients of the first longitudinal mode at the bridge stiffness.
constexpr double kRho = 0.1005;
constexpr double kB = 1.140;

TEST(Energy, ClosedForms) {
    EXPECT_EQ(energy_of(0.0, 0.0, kRho, kB), 0.0);
    const double A = 1.7;
    EXPECT_DOUBLE_EQ(energy_of(A, 0.0, kRho, kB), kRho * A * A / 2.0 + kB * std::pow(A, 4) / 4.0);
    EXPECT_DOUBLE_EQ(energy_of(0.0, 2.0, kRho, kB), 2.0);
}

TEST(Energy, AmplitudeRoundTrip) {
    for (double E : {1e-8, 1e-4, 0.3, 7.0, 1e3}) {
        const double A = amplitude_of(E, kRho, kB);
        EXPECT_NEAR(energy_of(A, 0.0, kRho, kB), E, 1e-12 * E) << E;
        EXPECT_DOUBLE_EQ(A * A, lambda_minus(E, kRho, kB));
        EXPECT_GT(lambda_plus(E, kRho, kB), 0.0);
    }
    EXPECT_EQ(amplitude_of(0.0, kRho, kB), 0.0);
    EXPECT_THROW(amplitude_of(-1.0, kRho, kB), DomainError);
}

TEST(Energy, EllipticParameterStaysBelowOneHalf) {
    for (double E : {0.0, 1e-3, 1.0, 1e6, 1e12}) {
        const double mu = elliptic_parameter(E, kRho, kB);
        EXPECT_GE(mu, 0.0);
        EXPECT_LT(mu, 0.5);
    }
}

TEST(Period, MatchesZeroCrossingOracleOverFourDecades) {
    for (int i = 0; i < 20; ++i) {
        const double E = 1e-3 * std::pow(10.0, 4.0 * i / 19.0);
        const double A = amplitude_of(E, kRho, kB);
        const double ref = oracle::duffing_period(kRho, kB, A);
        EXPECT_NEAR(period(E, kRho, kB), ref, 1e-8 * ref) << "E = " << E;
    }
}

TEST(Period, SmallEnergyLimitAndSlope) {
    const double T0 = period_at_zero(kRho);
    EXPECT_DOUBLE_EQ(T0, 2.0 * pi / std::sqrt(kRho));
    EXPECT_NEAR(period(1e-14, kRho, kB), T0, 1e-10 * T0);
    const double h = 1e-5;
    const double s1 = (period(h, kRho, kB) - T0) / h;
    const double s2 = (period(2.0 * h, kRho, kB) - T0) / (2.0 * h);
    const double slope = 2.0 * s1 - s2;
    const double expected = -3.0 * pi * kB / (2.0 * std::pow(kRho, 2.5));
    EXPECT_NEAR(slope, expected, 1e-3 * std::abs(expected));
}

TEST(Period, StrictlyDecreasingInEnergy) {
    double prev = period_at_zero(kRho);
    for (int i = 0; i < 60; ++i) {
        const double T = period(1e-6 * std::pow(10.0, 0.15 * i), kRho, kB);
        EXPECT_LT(T, prev) << i;
        prev = T;
    }
}

TEST(Period, ScalesInverselyWithFrequency) {
    const double E = 0.8;
    for (double c : {0.3, 1.7, 4.2}) {
        // phi(t) -> phi(c t) multiplies the energy by c^2.
        EXPECT_NEAR(period(c * c * E, c * c * kRho, c * c * kB), period(E, kRho, kB) / c,
                    1e-12 * period(E, kRho, kB) / c);
    }
}

TEST(Period, RejectsNonPositiveEnergy) {
    EXPECT_THROW(period(0.0, kRho, kB), DomainError);
    EXPECT_THROW(period(-1.0, kRho, kB), DomainError);
    EXPECT_THROW(period(1.0, -kRho, kB), DomainError);
}

TEST(Orbit, EnergyConservedOverOneHundredTimeUnits) {
    const auto traj = solve_orbit(2.0, 0.0, kRho, kB, 100.0, {}, 0.1);
    double lo = traj.energy0, hi = traj.energy0;
    for (const auto& s : traj.samples) {
        const double E = energy_of(s.phi, s.dphi, kRho, kB);
        lo = std::min(lo, E);
        hi = std::max(hi, E);
    }
    EXPECT_LT(hi - lo, IntegratorSettings{}.drift_per_100 * traj.energy0);
    EXPECT_EQ(traj.retries, 0);
    EXPECT_NEAR(traj.samples.back().t, 100.0, 1e-12);
}

TEST(Orbit, PointwiseBoundsOnFirstQuarterPeriod) {
    const double E = 2.5;
    const double T = period(E, kRho, kB);
    const auto traj = solve_orbit(0.0, std::sqrt(2.0 * E), kRho, kB, T / 4.0, {}, T / 400.0);
    const double amp = amplitude_of(E, kRho, kB);
    for (const auto& s : traj.samples) {
        const double bound = std::min(std::sqrt(2.0 * E / kRho) * std::sin(std::sqrt(kRho) * s.t), amp);
        EXPECT_GE(s.phi, -1e-12) << s.t;
        EXPECT_LE(s.phi, bound + 1e-9) << s.t;
    }
    EXPECT_NEAR(traj.samples.back().phi, amp, 1e-8);
}

TEST(Orbit, HalfPeriodAntisymmetry) {
    const double E = 4.0;
    const double T = period(E, kRho, kB);
    const auto traj = solve_orbit(0.0, std::sqrt(2.0 * E), kRho, kB, T, {}, T / 200.0);
    ASSERT_EQ(traj.samples.size(), 201u);
    for (int i = 0; i <= 100; ++i) {
        EXPECT_NEAR(traj.samples[100 + i].phi, -traj.samples[i].phi, 1e-8) << i;
    }
}

TEST(Orbit, LinearLimitIsHarmonic) {
    const auto traj = solve_orbit(0.0, 0.7, kRho, 0.0, 30.0, {}, 0.5);
    for (const auto& s : traj.samples) {
        EXPECT_NEAR(s.phi, 0.7 / std::sqrt(kRho) * std::sin(std::sqrt(kRho) * s.t), 1e-8) << s.t;
    }
}

TEST(Orbit, StepSamplingAndCsv) {
    const auto traj = solve_orbit(1.0, 0.0, kRho, kB, 5.0);
    ASSERT_GE(traj.samples.size(), 2u);
    EXPECT_EQ(traj.samples.front().t, 0.0);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) EXPECT_GT(traj.samples[i].t, traj.samples[i - 1].t);
    std::ostringstream os;
    write_orbit_csv(os, traj);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,phi,dphi,energy");
    EXPECT_THROW(solve_orbit(1.0, 0.0, kRho, kB, 0.0), DomainError);
}

TEST(Orbit, MakeOrbitIsConsistent) {
    const DuffingOrbit o = make_orbit(0.9, kRho, kB);
    EXPECT_DOUBLE_EQ(o.amplitude, amplitude_of(0.9, kRho, kB));
    EXPECT_DOUBLE_EQ(o.period, period(0.9, kRho, kB));
}

}  // namespace
}  // namespace flutter
