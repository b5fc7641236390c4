#include "calib/profiles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace calib;
namespace pr = calib::profile;

TEST(Smoothstep, EndpointsAndMidpoint) {
    EXPECT_EQ(pr::smoothstep5(0.0), 0.0);
    EXPECT_EQ(pr::smoothstep5(1.0), 1.0);
    EXPECT_DOUBLE_EQ(pr::smoothstep5(0.5), 0.5);
    EXPECT_EQ(pr::smoothstep7(-0.3), 0.0);
    EXPECT_EQ(pr::smoothstep7(1.7), 1.0);
    EXPECT_DOUBLE_EQ(pr::smoothstep7(0.5), 0.5);
}

TEST(Smoothstep, FlatEndsToOrder) {
    // S5 is C^2 and S7 is C^3 at both ends
    for (double w : {1e-4, 1.0 - 1e-4}) {
        const Jet3 j(w, 0);
        EXPECT_LT(std::abs(pr::smoothstep5(j).v(0)), 1e-6);
        EXPECT_LT(std::abs(pr::smoothstep7(j).v(0)), 1e-9);
    }
}

TEST(Bump, PlateauAndSupport) {
    for (double r : {0.0, 0.2, -0.5, 0.5}) EXPECT_EQ(pr::theta(r), 1.0);
    for (double r : {1.0, -1.0, 1.3}) EXPECT_EQ(pr::theta(r), 0.0);
    EXPECT_DOUBLE_EQ(pr::theta(0.75), 0.5);
}

TEST(Zeta, FrozenValues) {
    // (1 - r^2) on the plateau r^2 <= 1/2
    EXPECT_DOUBLE_EQ(pr::zeta(0.0), 1.0);
    EXPECT_DOUBLE_EQ(pr::zeta(0.5), 0.75);
    EXPECT_DOUBLE_EQ(pr::zeta(-0.5), 0.75);
    EXPECT_EQ(pr::zeta(1.0), 0.0);
    EXPECT_EQ(pr::zeta(2.0), 0.0);
}

TEST(Zeta, QuadraticAtOrigin) {
    // 1 - zeta(r) = r^2 near 0, so the ratio is exactly 1 on the plateau
    for (double r : {1e-3, 1e-2, 0.1, 0.5}) EXPECT_NEAR((1.0 - pr::zeta(r)) / (r * r), 1.0, 1e-9);
}

TEST(Zeta, MonotoneOnUnitInterval) {
    double prev = pr::zeta(0.0);
    for (int k = 1; k <= 1000; ++k) {
        const double z = pr::zeta(k / 1000.0);
        EXPECT_LE(z, prev + 1e-15);
        prev = z;
    }
}

TEST(LambdaTilde, Plateaus) {
    EXPECT_EQ(pr::lambda_tilde(-1.0), 1.0);
    EXPECT_EQ(pr::lambda_tilde(1.0 / 3.0 - 1e-12), 1.0);
    EXPECT_EQ(pr::lambda_tilde(2.0 / 3.0), 0.0);
    EXPECT_DOUBLE_EQ(pr::lambda_tilde(0.5), 0.5);
}

TEST(LambdaOfU, OneOnInterfaceSideZeroOnBoundarySide) {
    // u = cos of the angle to X_T: u = 1 on the ray X_T, u = cos(pi/6) on the ray X_Omega
    EXPECT_EQ(pr::lambda_of_u(1.0), 1.0);
    EXPECT_EQ(pr::lambda_of_u(std::cos(kPi / 6.0)), 0.0);
}

TEST(ThetaBar, IdentityCoreOddAndSaturated) {
    for (double r : {0.0, 0.1, 0.25, 0.5}) {
        EXPECT_EQ(pr::theta_bar(r), r);
        EXPECT_EQ(pr::theta_bar(-r), -r);
    }
    EXPECT_EQ(pr::theta_bar(1.0), 1.0);
    EXPECT_EQ(pr::theta_bar(5.0), 1.0);
    EXPECT_EQ(pr::theta_bar(-2.0), -1.0);
}

TEST(ThetaBar, DerivativeRangeAndContinuity) {
    double dmax = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double r = -1.2 + 2.4 * k / 2000.0;
        const double d = pr::theta_bar(Jet3(r, 0)).v(0);
        EXPECT_GE(d, -1e-14);
        dmax = std::max(dmax, d);
    }
    // g'(w) peaks where g''(w) = 0, i.e. w = (3 - sqrt 5)/2
    const double w = (3.0 - std::sqrt(5.0)) / 2.0;
    const double peak = 1.0 + w * w * (15.0 + w * (-40.0 + w * (30.0 - 6.0 * w)));
    EXPECT_NEAR(dmax, peak, 1e-5);
    EXPECT_NEAR(peak, 1.5491, 1e-4);
    // C^1 across the joints at 1/2 and 1
    for (double r : {0.5, 1.0}) {
        const double dl = pr::theta_bar(Jet3(r - 1e-9, 0)).v(0), dr = pr::theta_bar(Jet3(r + 1e-9, 0)).v(0);
        EXPECT_NEAR(dl, dr, 1e-6);
    }
}

TEST(ThetaBar, MonotoneRandomPairs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int k = 0; k < 5000; ++k) {
        double a = U(rng), b = U(rng);
        if (a > b) std::swap(a, b);
        EXPECT_LE(pr::theta_bar(a), pr::theta_bar(b) + 1e-15);
    }
}
