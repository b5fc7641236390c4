#pragma once

// Immutable scene description: domain boundary, interface families, velocity,
// fluid parameters.

#include "calib/curves.hpp"
#include "calib/velocity.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace calib {

struct FluidParams {
    double sigma = 1.0;
    double mu = 1.0;
    double rho_plus = 1.0;
    double rho_minus = 1.0;
    double rho(double chi) const { return rho_plus * chi + rho_minus * (1.0 - chi); }
};

/// Rigid rotation of an initial curve about the origin.
class RotatedCurve final : public InitialCurve {
public:
    RotatedCurve(std::shared_ptr<const InitialCurve> base, double angle)
        : base_(std::move(base)), c_(std::cos(angle)), s_(std::sin(angle)) {}
    std::array<Vec2d, 4> eval(double s) const override {
        auto g = base_->eval(s);
        for (auto& v : g) v = rot(v, s_);
        return g;
    }
    double s_begin() const override { return base_->s_begin(); }
    double s_end() const override { return base_->s_end(); }
    bool closed() const override { return base_->closed(); }
    std::optional<double> guess(const Vec2d& p) const override { return base_->guess(rot(p, -s_)); }

private:
    Vec2d rot(const Vec2d& v, double sn) const { return {c_ * v(0) - sn * v(1), sn * v(0) + c_ * v(1)}; }
    std::shared_ptr<const InitialCurve> base_;
    double c_, s_;
};

namespace shapes {

inline std::shared_ptr<const InitialCurve> disk(double R) {
    return std::make_shared<ArcCurve>(Vec2d::Zero(), R, 0.0, 1.0, true);
}

inline std::shared_ptr<const InitialCurve> ellipse(double a, double b) { return std::make_shared<EllipseCurve>(a, b); }

/// Diameter of the disk of radius R running in direction e(φ); Ω⁺ lies to its right.
inline std::shared_ptr<const InitialCurve> diameter(double phi, double R = 1.0) {
    return std::make_shared<SegmentCurve>(Vec2d::Zero(), R * unit_dir(phi));
}

/// Chord in direction e(φ) shifted by `offset` along its right normal.
inline std::shared_ptr<const InitialCurve> chord(double phi, double offset, double R = 1.0) {
    const Vec2d e = unit_dir(phi);
    const double L = std::sqrt(R * R - offset * offset);
    return std::make_shared<SegmentCurve>(offset * rperp(e), L * e);
}

/// Arc of the circle of radius ρ centred at D·e(φ), D^2 = R^2 + ρ^2, which meets
/// the disk boundary at 90 degrees. Ω⁺ is the side containing the origin when
/// `plus_contains_center`, otherwise the cap.
inline std::shared_ptr<const InitialCurve> orthogonal_arc(double phi, double rho, bool plus_contains_center,
                                                          double R = 1.0) {
    const double D = std::sqrt(R * R + rho * rho);
    const double beta = std::acos(rho / D);
    return std::make_shared<ArcCurve>(D * unit_dir(phi), rho, phi + kPi, plus_contains_center ? beta : -beta,
                                      false);
}

/// Closed circle traversed clockwise, so the inside is Ω⁺.
inline std::shared_ptr<const InitialCurve> circle(const Vec2d& center, double rho) {
    return std::make_shared<ArcCurve>(center, rho, 0.0, -1.0, true);
}

} // namespace shapes

struct Scene {
    std::string name = "scene";
    std::shared_ptr<const InitialCurve> boundary_shape;
    std::shared_ptr<const CurveFamily> boundary;
    double disk_radius = 0.0;   ///< > 0 when the domain is a disk centred at the origin
    double boundary_tube = 0.5; ///< tubular radius r_∂Ω
    std::vector<std::shared_ptr<const InitialCurve>> interface_shapes;
    std::vector<std::shared_ptr<const CurveFamily>> interfaces;
    VelocityField velocity;
    FluidParams fluid;
    double horizon = 1.0;
    double angle_tolerance_deg = 2.0;
    std::optional<double> r_hat;
    std::optional<double> delta;
    bool analytic_transport = true;

    bool is_disk() const { return disk_radius > 0.0; }
    double diameter() const;
};

inline double Scene::diameter() const {
    if (is_disk()) return 2.0 * disk_radius;
    double m = 0.0;
    for (int k = 0; k < 64; ++k) m = std::max(m, 2.0 * boundary_shape->eval(k / 64.0)[0].norm());
    return m;
}

/// Transported family of an initial interface under the scene velocity.
inline std::shared_ptr<const CurveFamily> transport_family(const std::shared_ptr<const InitialCurve>& g,
                                                           const VelocityField& v) {
    if (auto w = v.azimuthal()) return std::make_shared<TransportedCurve>(g, *w);
    return make_static(g);
}

struct DomainSpec {
    std::string kind = "disk";
    double radius = 1.0;
    double a = 1.0, b = 1.0;
};

inline Scene make_scene(const DomainSpec& dom, std::vector<std::shared_ptr<const InitialCurve>> shapes_,
                        VelocityField v, double horizon, FluidParams fluid = {}) {
    Scene sc;
    if (dom.kind == "disk") {
        sc.boundary_shape = shapes::disk(dom.radius);
        sc.disk_radius = dom.radius;
        sc.boundary_tube = 0.45 * dom.radius;
    } else if (dom.kind == "ellipse") {
        sc.boundary_shape = shapes::ellipse(dom.a, dom.b);
        const double rmin = std::min(dom.a, dom.b) * std::min(dom.a, dom.b) / std::max(dom.a, dom.b);
        sc.boundary_tube = 0.45 * rmin;
    } else {
        throw SceneError("unknown domain preset '" + dom.kind + "'");
    }
    sc.boundary = make_static(sc.boundary_shape);
    sc.velocity = std::move(v);
    sc.analytic_transport = sc.velocity.azimuthal().has_value();
    if (sc.analytic_transport && sc.velocity.name() != "zero" && !sc.is_disk())
        throw SceneError("azimuthal flows are tangential only on a disk centred at the origin");
    for (auto& g : shapes_) {
        sc.interfaces.push_back(transport_family(g, sc.velocity));
        sc.interface_shapes.push_back(g);
    }
    sc.horizon = horizon;
    sc.fluid = fluid;
    return sc;
}

/// Unit disk split by the vertical diameter {x1 = 0}, Ω⁺ = {x1 > 0}.
inline Scene disk_diameter(VelocityField v, double horizon = 1.0, double tilt = 0.0) {
    Scene sc = make_scene({}, {shapes::diameter(kPi / 2.0 + tilt)}, std::move(v), horizon);
    sc.name = "disk-diameter";
    return sc;
}

/// Same scene with every interface rotated by ε at t = 0 and transported by the same v.
inline Scene rotated_copy(const Scene& sc, double eps) {
    Scene w = sc;
    w.interfaces.clear();
    w.interface_shapes.clear();
    for (auto& g : sc.interface_shapes) {
        auto r = std::make_shared<RotatedCurve>(g, eps);
        w.interface_shapes.push_back(r);
        w.interfaces.push_back(transport_family(r, sc.velocity));
    }
    w.name = sc.name + "-rotated";
    return w;
}

} // namespace calib
