#include "calib/verify.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace calib;

namespace {

const Calibration& rotation_cal() {
    static const Calibration cal = make_calibration(disk_diameter(VelocityField::rotation(1.0), 1.0));
    return cal;
}

const Calibration& arc_cal() {
    static const Calibration cal =
        make_calibration(make_scene({}, {shapes::orthogonal_arc(0.3, 0.8, true)}, VelocityField::zero(), 1.0));
    return cal;
}

Vec2d rotate(const Vec2d& p, double a) { return {std::cos(a) * p(0) - std::sin(a) * p(1), std::sin(a) * p(0) + std::cos(a) * p(1)}; }

template <class F> void for_random_points(const Scene& sc, int n, std::uint64_t seed, F&& f) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < n;) {
        const Vec2d p = std::sqrt(U(rng)) * unit_dir(2.0 * kPi * U(rng));
        if (!inside_domain(sc, p)) continue;
        f(p, U(rng) * sc.horizon);
        ++k;
    }
}

} // namespace

TEST(Radii, OrderedAndPositive) {
    for (const Calibration* c : {&rotation_cal(), &arc_cal()}) {
        const auto& R = c->radii();
        EXPECT_GT(R.r_hat, 0.0);
        EXPECT_GT(R.delta, 0.0);
        EXPECT_LE(R.delta, 0.25);
        for (double r : R.r_hat_c) EXPECT_LT(R.r_hat, r);
        for (double r : R.r_i) EXPECT_LT(R.r_hat, r);
        EXPECT_EQ(R.contacts.size(), 2u);
    }
}

TEST(Calibration, LengthAtMostOne) {
    for (const Calibration* c : {&rotation_cal(), &arc_cal()})
        for_random_points(c->scene(), 2000, 5, [&](const Vec2d& p, double t) { EXPECT_LE(c->xi(p, t).norm(), 1.0 + 1e-12); });
}

TEST(Calibration, CutoffsFormPartitionOfUnityOnInterface) {
    for (const Calibration* c : {&rotation_cal(), &arc_cal()}) {
        const auto& cf = *c->scene().interfaces[0];
        for (int k = 0; k <= 200; ++k) {
            const double t = 0.3;
            const Vec2d p = cf.eval(cf.s_begin() + (cf.s_end() - cf.s_begin()) * k / 200.0, t).p;
            EXPECT_NEAR(c->cutoffs<double>(p, t).sum(), 1.0, 1e-10);
        }
    }
}

TEST(Calibration, CutoffsAreNonNegativeAndBounded) {
    for_random_points(arc_cal().scene(), 1000, 9, [&](const Vec2d& p, double t) {
        const auto cu = arc_cal().cutoffs<double>(p, t);
        EXPECT_GE(cu.eta_bulk, 0.0);
        EXPECT_LE(cu.eta_bulk, 1.0);
        for (double e : cu.eta_i) EXPECT_GE(e, 0.0);
        for (double e : cu.eta_c) EXPECT_GE(e, 0.0);
        EXPECT_LE(cu.sum() + cu.eta_bulk, 1.0 + 1e-12);
    });
}

TEST(Calibration, TangentialOnBoundary) {
    for (const Calibration* c : {&rotation_cal(), &arc_cal()})
        for (int k = 0; k < 360; ++k) {
            const Vec2d p = unit_dir(2.0 * kPi * (k + 0.5) / 360);
            EXPECT_NEAR(c->xi(p, 0.2).dot(p), 0.0, 1e-10);
        }
}

TEST(Calibration, RotationEquivariance) {
    // rigid rotation with unit speed: xi(R_t p, t) = R_t xi(p, 0)
    const Calibration& c = rotation_cal();
    for_random_points(c.scene(), 300, 13, [&](const Vec2d& p, double t) {
        EXPECT_NEAR((c.xi(rotate(p, t), t) - rotate(c.xi(p, 0.0), t)).norm(), 0.0, 1e-11);
    });
}

TEST(Calibration, JetMatchesCentralDifferences) {
    const Calibration& c = arc_cal();
    const std::vector<Vec2d> pts = {{0.1, 0.2}, {-0.3, 0.5}, {0.5, -0.1}};
    for (const Vec2d& p : pts) {
        const auto J = c.xi_derivs(p, 0.1);
        const auto F = central_differences([&](const Vec2d& q, double s) { return c.xi(q, s); }, p, 0.1, 1e-6);
        EXPECT_NEAR((J.jac - F.jac).norm(), 0.0, 1e-6);
    }
}

TEST(Calibration, VerificationRejectsUntransportedFixture) {
    // the dipole flow moves the chord, but the scene keeps it static
    const Scene sc = make_scene({}, {shapes::chord(kPi / 2.0, 0.3)}, VelocityField::dipole(1.0), 1.0);
    EXPECT_THROW(require_transported(sc, {0.0, 0.5}), FixtureInconsistent);
    EXPECT_NO_THROW(require_transported(rotation_cal().scene(), {0.0, 0.5}));
}
