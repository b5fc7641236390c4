#include "calib/calibration_contact.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace calib;

namespace {

Scene static_diameter() { return disk_diameter(VelocityField::zero()); }

} // namespace

TEST(AuxInterface, FrozenValueAtUpperContact) {
    // straight interface x1 = 0, unit circle: alpha_T = -H_bd = -1 at c = (0,1),
    // tau_I = (0,1). At s = 0.1: n + alpha s tau - alpha^2 s^2 n / 2 = (0.995, -0.1).
    const Scene sc = static_diameter();
    const auto f = contact_frame<double>(sc, 0, 1, 0.0);
    EXPECT_NEAR(f.alpha_T, -1.0, 1e-9);
    const Vec2d x = xi_aux_interface(sc, f, Vec2d(0.1, 0.9), 0.0);
    EXPECT_NEAR(x(0), 0.995, 1e-9);
    EXPECT_NEAR(x(1), -0.1, 1e-9);
}

TEST(AuxBoundary, FrozenValueAtUpperContact) {
    // straight interface: alpha_B = 0, so the field is the oriented boundary tangent
    // at the projection p/|p| = (1,3)/sqrt(10); tau_bd(c) = n_I = (1,0) fixes its sign
    const Scene sc = static_diameter();
    const auto f = contact_frame<double>(sc, 0, 1, 0.0);
    EXPECT_NEAR(f.alpha_B, 0.0, 1e-12);
    const Vec2d x = xi_aux_boundary(sc, f, Vec2d(0.3, 0.9));
    EXPECT_NEAR(x(0), 3.0 / std::sqrt(10.0), 1e-9);
    EXPECT_NEAR(x(1), -1.0 / std::sqrt(10.0), 1e-9);
}

TEST(AuxFields, LengthIdentity) {
    const Scene sc = make_scene({}, {shapes::orthogonal_arc(0.4, 0.7, false)}, VelocityField::zero(), 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int end : {0, 1}) {
        const auto f = contact_frame<double>(sc, 0, end, 0.0);
        for (int k = 0; k < 500; ++k) {
            const Vec2d p = f.c + 0.2 * std::sqrt(U(rng)) * unit_dir(2.0 * kPi * U(rng));
            if (!inside_domain(sc, p)) continue;
            const double s = interface_chart(sc, 0, p, 0.0).s;
            const double sb = boundary_chart(sc, p, f.boundary_orient).s;
            EXPECT_NEAR(xi_aux_interface(sc, f, p, 0.0).squaredNorm(), 1.0 + 0.25 * std::pow(f.alpha_T * s, 4), 1e-12);
            EXPECT_NEAR(xi_aux_boundary(sc, f, p).squaredNorm(), 1.0 + 0.25 * std::pow(f.alpha_B * sb, 4), 1e-12);
        }
    }
}

TEST(AuxFields, AgreeToFirstOrderAtContact) {
    // both building blocks equal n_I at c; their difference is O(dist^2)
    const Scene sc = make_scene({}, {shapes::orthogonal_arc(0.4, 0.7, true)}, VelocityField::zero(), 1.0);
    const auto f = contact_frame<double>(sc, 0, 0, 0.0);
    auto gap = [&](double d) {
        const Vec2d p = f.c + d * (std::cos(kPi / 4.0) * f.n_b + std::sin(kPi / 4.0) * f.tau_b);
        return (xi_aux_interface(sc, f, p, 0.0) - xi_aux_boundary(sc, f, p)).norm();
    };
    EXPECT_NEAR((xi_aux_interface(sc, f, f.c, 0.0) - f.n_i).norm(), 0.0, 1e-12);
    EXPECT_NEAR((xi_aux_boundary(sc, f, f.c) - f.n_i).norm(), 0.0, 1e-12);
    EXPECT_NEAR(std::log2(gap(2e-3) / gap(1e-3)), 2.0, 0.05);
}

TEST(Interpolation, LambdaRangeAndEdges) {
    const Scene sc = static_diameter();
    const auto f = contact_frame<double>(sc, 0, 1, 0.0);
    for (int side : {0, 1}) {
        const double sg = side == 0 ? 1.0 : -1.0;
        auto at = [&](double a) { return f.c + 0.05 * (std::cos(a) * f.n_b + sg * std::sin(a) * f.tau_b); };
        EXPECT_EQ(interp_lambda(f, Vec2d(at(kPi / 6.0)), side), 1.0);
        EXPECT_EQ(interp_lambda(f, Vec2d(at(kPi / 3.0)), side), 0.0);
        for (int k = 0; k <= 100; ++k) {
            const double lam = interp_lambda(f, Vec2d(at(kPi / 6.0 + kPi / 6.0 * k / 100)), side);
            EXPECT_GE(lam, 0.0);
            EXPECT_LE(lam, 1.0);
        }
    }
    EXPECT_THROW(interp_lambda(f, f.c, 0), AtContactPoint);
}

TEST(Interpolation, GradientScalesLikeInverseDistance) {
    const Scene sc = static_diameter();
    const ContactId id{0, 1};
    const auto f = contact_frame<double>(sc, 0, 1, 0.0);
    const double a = kPi / 4.0;
    auto g = [&](double d) {
        const Vec2d p = f.c + d * (std::cos(a) * f.n_b + std::sin(a) * f.tau_b);
        return lambda_derivs(sc, id, p, 0.0, 0).grad.norm();
    };
    EXPECT_NEAR(g(1e-3) * 1e-3, g(1e-2) * 1e-2, 1e-12);
}

TEST(ContactField, UnitLengthAndNormalOnInterface) {
    const Scene sc = make_scene({}, {shapes::orthogonal_arc(0.4, 0.7, true)}, VelocityField::zero(), 1.0);
    const auto f = contact_frame<double>(sc, 0, 1, 0.0);
    for (int k = 1; k <= 20; ++k) {
        const double a = -2.0 * kPi / 3.0 + 4.0 * kPi / 3.0 * k / 21.0;
        const Vec2d p = f.c + 0.03 * (std::cos(a) * f.n_b + std::sin(a) * f.tau_b);
        EXPECT_NEAR(xi_contact(sc, f, p, 0.0).norm(), 1.0, 1e-14);
    }
    const auto cf = sc.interfaces[0];
    const auto cp = cf->eval(cf->s_end() - 0.01, 0.0);
    const Vec2d n = rperp(Vec2d(cp.d1.normalized()));
    EXPECT_NEAR((xi_contact(sc, f, cp.p, 0.0) - n).norm(), 0.0, 1e-10);
}
