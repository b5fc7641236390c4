#include "calib/calibration_bulk.hpp"

#include <gtest/gtest.h>

using namespace calib;

TEST(BulkExtension, DiameterNormalIsConstant) {
    const Scene sc = disk_diameter(VelocityField::zero());
    for (double x : {-0.2, 0.0, 0.15})
        for (double y : {-0.5, 0.3}) {
            const auto X = xi_bulk_derivs(sc, 0, Vec2d(x, y), 0.0);
            EXPECT_NEAR((X.value - Vec2d(1.0, 0.0)).norm(), 0.0, 1e-15);
            EXPECT_NEAR(X.jac.norm(), 0.0, 1e-14);
        }
}

TEST(BulkExtension, RotatesWithRigidRotation) {
    const Scene sc = disk_diameter(VelocityField::rotation(1.0));
    const double t = 0.7;
    const Vec2d p = 0.3 * unit_dir(kPi / 2.0 + t) + 0.05 * unit_dir(t);
    const auto X = xi_bulk_derivs(sc, 0, p, t);
    EXPECT_NEAR((X.value - unit_dir(t)).norm(), 0.0, 1e-12);
    const auto v = sc.velocity.derivs(p, t);
    // both the transport residual and the length evolution vanish identically
    EXPECT_NEAR(transport_residual(X, v).norm(), 0.0, 1e-12);
    EXPECT_NEAR(length_evolution(X, v), 0.0, 1e-12);
}

TEST(BulkExtension, ArcDivergenceIsMinusCurvature) {
    const double rho = 0.6;
    const Scene sc = make_scene({}, {shapes::orthogonal_arc(0.0, rho, true)}, VelocityField::zero(), 1.0);
    const Vec2d centre(std::sqrt(1.0 + rho * rho), 0.0);
    for (double a : {-0.4, 0.0, 0.3}) {
        const Vec2d p = centre + rho * unit_dir(kPi + a);
        const auto X = xi_bulk_derivs(sc, 0, p, 0.0);
        const double H = interface_curvature_at(sc, 0, p, 0.0);
        EXPECT_NEAR(std::abs(H), 1.0 / rho, 1e-9);
        EXPECT_NEAR(X.divergence() + H, 0.0, 1e-9);
        EXPECT_NEAR(X.value.norm(), 1.0, 1e-14);
    }
}

TEST(BulkExtension, JetAgreesWithCentralDifferences) {
    const Scene sc = disk_diameter(VelocityField::radial_shear(1.0, 2.0), 0.5);
    const Vec2d p(0.07, 0.4);
    const double t = 0.3;
    const auto J = xi_bulk_derivs(sc, 0, p, t);
    const auto F = central_differences([&](const Vec2d& q, double s) { return xi_bulk(sc, 0, q, s); }, p, t, 1e-5);
    EXPECT_NEAR((J.jac - F.jac).norm(), 0.0, 1e-8);
    EXPECT_NEAR((J.dt - F.dt).norm(), 0.0, 1e-8);
}

TEST(BulkExtension, ShearTransportResidualIsLinearInDistance) {
    // along the normal the residual grows like dist: ratio r(2d)/r(d) -> 2
    const Scene sc = disk_diameter(VelocityField::radial_shear(1.0, 2.0), 0.5);
    const double t = 0.25;
    const auto cp = sc.interfaces[0]->eval(0.6 * sc.interfaces[0]->s_end() + 0.4 * sc.interfaces[0]->s_begin(), t);
    const Vec2d n = rperp(Vec2d(cp.d1.normalized()));
    auto r = [&](double d) {
        const Vec2d p = cp.p + d * n;
        return transport_residual(xi_bulk_derivs(sc, 0, p, t), sc.velocity.derivs(p, t)).norm();
    };
    EXPECT_NEAR(r(0.0), 0.0, 1e-12);
    const double q = r(2e-3) / r(1e-3);
    EXPECT_NEAR(q, 2.0, 0.05);
}
