#pragma once

// Signed-distance charts of ∂Ω and of the interfaces, phase membership, contact
// frames and wedge classification.

#include "calib/scene.hpp"

#include <vector>

namespace calib {

// ---------------------------------------------------------------- charts

/// Boundary chart: s > 0 inside Ω, n inward, H = -Δs∘P. `orient` flips τ.
template <class T> Chart<T> boundary_chart(const Scene& sc, const Vec2<T>& p, int orient = 1) {
    const Projection pr = project(*sc.boundary, value(p), 0.0);
    Chart<T> ch = curve_chart(*sc.boundary, p, T(0.0), -1, pr);
    if (std::abs(value(ch.s)) >= 2.0 * sc.boundary_tube)
        throw OutsideTubularBand("point at distance " + std::to_string(value(ch.s)) + " from the boundary");
    ch.tau = ch.tau * double(orient);
    return ch;
}

inline Chart<double> boundary_chart(const Scene& sc, const Vec2d& p, int orient = 1) {
    return boundary_chart<double>(sc, p, orient);
}

/// Signed distance to ∂Ω without band restriction (positive inside).
inline double boundary_signed_distance(const Scene& sc, const Vec2d& p) {
    if (sc.is_disk()) return sc.disk_radius - p.norm();
    const Projection pr = project(*sc.boundary, p, 0.0);
    const Vec2d n = perp(Vec2d(pr.cp.d1.normalized()));
    return (p - pr.cp.p).dot(n);
}

inline bool inside_domain(const Scene& sc, const Vec2d& p) { return boundary_signed_distance(sc, p) > 0.0; }

/// Interface chart: ∇s = n points into Ω⁺, τ follows the parametrization.
/// `band` is the admissible half-width (2 r_i).
template <class T> Chart<T> interface_chart(const Scene& sc, int i, const Vec2<T>& p, const T& t,
                                            double band = 2.0) {
    const CurveFamily& c = *sc.interfaces.at(i);
    const Projection pr = project(c, value(p), value(t));
    if (pr.beyond_end || pr.distance >= band)
        throw OutsideTubularBand("point outside the band of interface " + std::to_string(i));
    return curve_chart(c, p, t, 1, pr);
}

inline Chart<double> interface_chart(const Scene& sc, int i, const Vec2d& p, double t, double band = 2.0) {
    return interface_chart<double>(sc, i, p, t, band);
}

/// Index and signed distance of the nearest interface; +1 for Ω⁺, -1 for Ω⁻.
struct PhaseInfo {
    int interface = -1;
    double s = 0.0;
    int phase() const { return s > 0.0 ? 1 : -1; }
};

inline PhaseInfo nearest_interface(const Scene& sc, const Vec2d& p, double t) {
    PhaseInfo best;
    double dbest = 1e300;
    for (int i = 0; i < int(sc.interfaces.size()); ++i) {
        const Projection pr = project(*sc.interfaces[i], p, t);
        const Vec2d n = rperp(Vec2d(pr.cp.d1.normalized()));
        const double s = (p - pr.cp.p).dot(n);
        const double d = pr.beyond_end ? pr.distance : std::abs(s);
        if (d < dbest) {
            dbest = d;
            best.interface = i;
            best.s = pr.beyond_end ? std::copysign(pr.distance, s) : s;
        }
    }
    return best;
}

/// Characteristic function of Ω⁺ (1 inside, 0 outside).
inline double chi_plus(const Scene& sc, const Vec2d& p, double t) {
    return nearest_interface(sc, p, t).s > 0.0 ? 1.0 : 0.0;
}

/// Unsigned distance to the interface set.
inline double interface_distance(const Scene& sc, const Vec2d& p, double t) {
    double d = 1e300;
    for (const auto& c : sc.interfaces) d = std::min(d, project(*c, p, t).distance);
    return d;
}

// ---------------------------------------------------------------- contact frames

/// Frame at a moving contact point. Side index 0 is '+', 1 is '−'.
template <class T> struct ContactFrame {
    int interface = 0;
    int end = 0;        ///< 0: σ = s_begin, 1: σ = s_end
    Vec2<T> c, dc;      ///< position and velocity
    Vec2<T> n_b, tau_b; ///< boundary frame, τ_∂Ω = n_I at c
    Vec2<T> n_i, tau_i; ///< interface frame, τ_I = -n_∂Ω at c
    int boundary_orient = 1;  ///< τ_∂Ω = orient · counter-clockwise tangent
    int interface_orient = 1; ///< τ_I = orient · parametrization tangent
    Vec2<T> XT[2], XO[2], XB[2];
    T alpha_T, alpha_B;
    T H_b, H_i;
    double comp_zero_residual = 0.0;
    double angle_deviation_deg = 0.0;
};

inline constexpr double kSqrt3Half = 0.86602540378443864676;

/// Contact frame of the given interface end at time t (jet in t allowed).
template <class T> ContactFrame<T> contact_frame(const Scene& sc, int i, int end, const T& t,
                                                 bool check_angle = true) {
    const CurveFamily& cf = *sc.interfaces.at(i);
    if (cf.closed()) throw DegenerateGeometry("closed interface has no contact points");
    const double t0 = value(t);
    const double se = end == 0 ? cf.s_begin() : cf.s_end();
    const CurvePoint cp = cf.eval(se, t0);
    const T dt = t - T(t0);
    const LiftedCurve<T> l = lift_curve(cp, T(0.0), dt);

    ContactFrame<T> f;
    f.interface = i;
    f.end = end;
    f.c = l.p;
    f.dc = lift<T>(cp.pt);

    const Chart<T> bc = boundary_chart<T>(sc, f.c, 1);
    if (std::abs(value(bc.s)) > 1e-8 * sc.diameter())
        throw FixtureInconsistent("interface endpoint is not on the boundary (distance " +
                                  std::to_string(value(bc.s)) + ")");
    Vec2<T> tau_curve;
    curve_frame(l, 1, tau_curve, f.n_i, f.H_i);
    f.n_b = bc.n;
    f.H_b = bc.H;
    f.boundary_orient = value(bc.tau).dot(value(f.n_i)) >= 0.0 ? 1 : -1;
    f.tau_b = bc.tau * double(f.boundary_orient);
    f.interface_orient = value(tau_curve).dot(-value(f.n_b)) >= 0.0 ? 1 : -1;
    f.tau_i = tau_curve * double(f.interface_orient);

    const double dev = std::asin(std::min(1.0, std::abs(value(f.n_i).dot(value(f.n_b)))));
    f.angle_deviation_deg = dev * 180.0 / kPi;
    if (check_angle && f.angle_deviation_deg > sc.angle_tolerance_deg)
        throw AngleViolation("contact angle deviates from 90 degrees by " + std::to_string(f.angle_deviation_deg) +
                             " degrees at interface " + std::to_string(i) + " end " + std::to_string(end));
    f.comp_zero_residual =
        std::max((value(f.tau_i) + value(f.n_b)).norm(), (value(f.n_i) - value(f.tau_b)).norm());

    for (int k = 0; k < 2; ++k) {
        const double sg = k == 0 ? 1.0 : -1.0;
        f.XT[k] = f.n_b * kSqrt3Half + f.tau_b * (0.5 * sg);
        f.XO[k] = f.n_b * 0.5 + f.tau_b * (kSqrt3Half * sg);
        f.XB[k] = f.n_b * -0.5 + f.tau_b * (kSqrt3Half * sg);
    }
    f.alpha_T = -f.H_b;
    f.alpha_B = -f.H_i;
    return f;
}

/// Identifier of a contact point: (interface, end).
struct ContactId {
    int interface = 0;
    int end = 0;
};

inline std::vector<ContactId> contact_ids(const Scene& sc) {
    std::vector<ContactId> ids;
    for (int i = 0; i < int(sc.interfaces.size()); ++i)
        if (!sc.interfaces[i]->closed()) {
            ids.push_back({i, 0});
            ids.push_back({i, 1});
        }
    return ids;
}

inline std::vector<ContactFrame<double>> locate_contact_points(const Scene& sc, double t) {
    std::vector<ContactFrame<double>> out;
    for (const auto& id : contact_ids(sc)) out.push_back(contact_frame<double>(sc, id.interface, id.end, t));
    return out;
}

/// Residual of the higher-order compatibility condition
/// (τ_I·∇)(n_I·v) - H_∂Ω (n_I·v) at the contact point.
inline double comp_higher_residual(const Scene& sc, const ContactFrame<double>& f, double t) {
    const Vec2<Jet3> p = seed_point(f.c);
    const Jet3 tj(t);
    const Chart<Jet3> ch = interface_chart<Jet3>(sc, f.interface, p, tj);
    const Vec2<Jet3> v = sc.velocity.eval<Jet3>(p, tj);
    const Jet3 g = ch.n.dot(v);
    const double dtau = g.v(0) * f.tau_i(0) + g.v(1) * f.tau_i(1);
    return dtau - f.H_b * g.a;
}

// ---------------------------------------------------------------- wedges

enum class Wedge { Interface, OmegaPlus, OmegaMinus, BoundaryPlus, BoundaryMinus, Uncovered, OutsideBall };

inline const char* wedge_name(Wedge w) {
    switch (w) {
    case Wedge::Interface: return "W_T";
    case Wedge::OmegaPlus: return "W_Omega+";
    case Wedge::OmegaMinus: return "W_Omega-";
    case Wedge::BoundaryPlus: return "W_dOmega+";
    case Wedge::BoundaryMinus: return "W_dOmega-";
    case Wedge::Uncovered: return "uncovered";
    case Wedge::OutsideBall: return "outside-ball";
    }
    return "?";
}

inline bool is_omega_wedge(Wedge w) { return w == Wedge::OmegaPlus || w == Wedge::OmegaMinus; }
inline bool is_boundary_wedge(Wedge w) { return w == Wedge::BoundaryPlus || w == Wedge::BoundaryMinus; }
/// Side index (0 for '+', 1 for '−') of a signed wedge.
inline int wedge_side(Wedge w) { return (w == Wedge::OmegaMinus || w == Wedge::BoundaryMinus) ? 1 : 0; }

/// Angle of p - c measured from n_∂Ω towards τ_∂Ω (= n_I), in (-π, π].
inline double contact_angle_of(const Vec2d& p, const ContactFrame<double>& f) {
    const Vec2d d = p - f.c;
    return std::atan2(d.dot(f.tau_b), d.dot(f.n_b));
}

/// Cone membership with priority W_T > W_Ω± > W_∂Ω± on shared rays.
template <class T> Wedge classify_direction(const Vec2d& p, const ContactFrame<T>& f) {
    const Vec2d d = p - value(f.c);
    // at c itself every building block equals n_I; avoid λ there
    if (d.norm() <= 1e-14) return Wedge::Interface;
    const double a = std::atan2(d.dot(value(f.tau_b)), d.dot(value(f.n_b)));
    const double m = std::abs(a);
    const double eps = 1e-13;
    if (m <= kPi / 6.0 + eps) return Wedge::Interface;
    if (m <= kPi / 3.0 + eps) return a > 0 ? Wedge::OmegaPlus : Wedge::OmegaMinus;
    if (m <= 2.0 * kPi / 3.0 + eps) return a > 0 ? Wedge::BoundaryPlus : Wedge::BoundaryMinus;
    return Wedge::Uncovered;
}

inline Wedge classify_wedge(const Vec2d& p, const ContactFrame<double>& f, double r_c) {
    if ((p - f.c).norm() > r_c) return Wedge::OutsideBall;
    return classify_direction(p, f);
}

} // namespace calib
