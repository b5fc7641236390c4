#include "calib/transport_sim.hpp"

#include <gtest/gtest.h>

using namespace calib;

namespace {

MarkerCurve parabola(int panels) {
    return MarkerCurve::sample(panels, false, [](double u) { return Vec2d(u, u * u); });
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

} // namespace

TEST(MarkerCurve, ReproducesPolynomialsExactly) {
    const auto c = parabola(3);
    EXPECT_EQ(c.size(), 4u + 3u * MarkerCurve::M);
    for (double u : {0.0, 0.37, 1.5, 2.99, 3.0}) {
        const auto [x, d] = c.eval(u);
        const double w = u / 3.0;
        EXPECT_NEAR((x - Vec2d(w, w * w)).norm(), 0.0, 1e-14);
        EXPECT_NEAR((d - Vec2d(1.0, 2.0 * w) / 3.0).norm(), 0.0, 1e-13);
    }
}

TEST(MarkerCurve, LengthAndFluxOracles) {
    const auto c = parabola(8);
    // int_0^1 sqrt(1 + 4u^2) du
    EXPECT_NEAR(c.length(), (2.0 * std::sqrt(5.0) + std::asinh(2.0)) / 4.0, 1e-12);
    // (1/2) int x dy - y dx = (1/2) int (2u^2 - u^2) du = 1/6
    EXPECT_NEAR(c.signed_area_flux(), 1.0 / 6.0, 1e-14);
    const auto circle = MarkerCurve::from_initial(*shapes::circle(Vec2d(0.2, 0.1), 0.4), 360);
    EXPECT_NEAR(circle.length(), 2.0 * kPi * 0.4, 1e-12);
}

TEST(MarkerCurve, StateRoundTrip) {
    auto c = parabola(4);
    auto s = c.state();
    for (double& x : s) x += 0.25;
    c.set_state(s);
    EXPECT_NEAR((c.front() - Vec2d(0.25, 0.25)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((c.back() - Vec2d(1.25, 1.25)).norm(), 0.0, 1e-15);
}

TEST(MarkerCurve, RedistributionEqualisesPanelsAndKeepsShape) {
    const auto c = MarkerCurve::sample(6, false, [](double u) { return Vec2d(u * u * u, u); });
    const auto r = c.redistributed();
    const auto L = r.panel_lengths();
    for (double l : L) EXPECT_NEAR(l, r.length() / 6.0, 1e-6);
    EXPECT_NEAR(r.length(), c.length(), 1e-9);
    for (int k = 0; k <= 60; ++k) {
        const Vec2d p = r.eval(6.0 * k / 60).first;
        EXPECT_NEAR(p(0), std::pow(p(1), 3), 1e-6);
    }
}

TEST(Evolve, RotationByQuarterTurn) {
    const Scene sc = make_scene({}, {shapes::diameter(0.0)}, VelocityField::rotation(1.0), kPi / 2.0);
    const auto tr = evolve(sc, {0.0, kPi / 4.0, kPi / 2.0});
    const auto ref = MarkerCurve::from_initial(*shapes::diameter(kPi / 2.0));
    EXPECT_LT(max_abs_diff(tr.curves.back()[0].state(), ref.state()), 1e-8);
    EXPECT_LT(tr.contacts.back().max_boundary_distance, 1e-8);
    EXPECT_LT(tr.contacts.back().max_angle_deviation_deg, 1e-6);
    EXPECT_NEAR(tr.area.back(), kPi / 2.0, 1e-10);
}

TEST(Evolve, AgreesWithAnalyticShearFamily) {
    const Scene sc = disk_diameter(VelocityField::radial_shear(1.0, 2.0), 0.5);
    const auto tr = evolve(sc, uniform_grid(0.5, 0.05));
    const auto ref = MarkerCurve::from_family(*sc.interfaces[0], 0.5);
    EXPECT_LT(max_abs_diff(tr.curves.back()[0].state(), ref.state()), 1e-8);
    EXPECT_EQ(tr.redistributions, 0);
}

TEST(Evolve, PerimeterRateAndAreaUnderShear) {
    const Scene sc = disk_diameter(VelocityField::radial_shear(1.0, 2.0), 0.25);
    const auto tr = evolve(sc, uniform_grid(0.25, 1e-3));
    const auto pr = perimeter_rate_check(sc, tr);
    EXPECT_LT(pr.residual, 1e-2);
    EXPECT_GT(pr.max_rate, 0.1);
    for (double a : tr.area) EXPECT_NEAR(a / tr.area.front(), 1.0, 1e-7);
}

TEST(Evolve, DipoleConservesAreaAndSeparatesContacts) {
    const Scene sc = make_scene({}, {shapes::chord(0.3, 0.2)}, VelocityField::dipole(1.0), 0.5);
    const auto tr = evolve(sc, uniform_grid(0.5, 0.01));
    for (double a : tr.area) EXPECT_NEAR(a / tr.area.front(), 1.0, 1e-7);
    EXPECT_GE(separation_bound_ratio(sc, tr), 1.0);
    EXPECT_LT(tr.contacts.back().max_boundary_distance, 1e-8);
}

TEST(Evolve, RigidRotationHasNoStrain) {
    EXPECT_LT(max_strain(disk_diameter(VelocityField::rotation(2.0)), 0.3), 1e-13);
    EXPECT_GT(max_strain(disk_diameter(VelocityField::radial_shear(1.0, 2.0)), 0.3), 0.1);
}

TEST(Evolve, MarkerPhaseFeedsEntropy) {
    // marker-based weak phase matches the analytic one at the same time
    const auto f = make_pair("radial_shear", 0.05, 0.3);
    const Calibration cal = make_calibration(f.strong);
    const auto tr = evolve(f.weak_scene, uniform_grid(0.3, 0.1));
    WeakSolution w;
    w.phase = [&](double t) { return tr.phase(std::size_t(std::lround(t / 0.1))); };
    const auto a = relative_entropy(cal, w, 0.3);
    const auto b = relative_entropy(cal, f.weak, 0.3);
    EXPECT_NEAR(a.E_vol, b.E_vol, 1e-8);
    EXPECT_NEAR(a.E, b.E, 1e-4 * b.E);
}

TEST(Grid, UniformGrid) {
    const auto g = uniform_grid(0.5, 0.1);
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 0.5);
    EXPECT_THROW(evolve(disk_diameter(VelocityField::zero()), std::vector<double>{}), SceneError);
}
