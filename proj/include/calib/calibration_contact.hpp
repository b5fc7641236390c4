#pragma once

// Contact-point extension ξ^c: expansion building blocks near the interface and
// near the boundary, the interpolation parameter λ, and normalization.

#include "calib/geometry.hpp"
#include "calib/profiles.hpp"

namespace calib {

/// n_I + α_T s τ_I - ½ α_T² s² n_I in the interface chart.
template <class T> Vec2<T> xi_aux_interface(const Scene& sc, const ContactFrame<T>& f, const Vec2<T>& p,
                                            const T& t, double band = 2.0) {
    const Chart<T> ch = interface_chart<T>(sc, f.interface, p, t, band);
    const Vec2<T> tau = ch.tau * double(f.interface_orient);
    const T as = f.alpha_T * ch.s;
    return ch.n + tau * as - ch.n * (0.5 * as * as);
}

/// τ_∂Ω + α_∂Ω s n_∂Ω - ½ α_∂Ω² s² τ_∂Ω in the boundary chart.
template <class T> Vec2<T> xi_aux_boundary(const Scene& sc, const ContactFrame<T>& f, const Vec2<T>& p) {
    const Chart<T> bc = boundary_chart<T>(sc, p, f.boundary_orient);
    const T as = f.alpha_B * bc.s;
    return bc.tau + bc.n * as - bc.tau * (0.5 * as * as);
}

/// Cosine variable u = X^±_T · (p - c)/|p - c|.
template <class T> T wedge_cosine(const ContactFrame<T>& f, const Vec2<T>& p, int side) {
    const Vec2<T> d = p - f.c;
    const T r = norm(d);
    if (value(r) <= 1e-14) throw AtContactPoint("interpolation parameter undefined at the contact point");
    return f.XT[side].dot(d) / r;
}

/// Interpolation parameter λ^± on the interpolation wedge of the given side.
template <class T> T interp_lambda(const ContactFrame<T>& f, const Vec2<T>& p, int side) {
    return profile::lambda_of_u(wedge_cosine(f, p, side));
}

/// Un-normalized contact field ξ̂^c by wedge.
template <class T> Vec2<T> xi_contact_hat(const Scene& sc, const ContactFrame<T>& f, const Vec2<T>& p,
                                          const T& t, double band = 2.0) {
    const Wedge w = classify_direction(value(p), f);
    switch (w) {
    case Wedge::Interface: return xi_aux_interface(sc, f, p, t, band);
    case Wedge::BoundaryPlus:
    case Wedge::BoundaryMinus: return xi_aux_boundary(sc, f, p);
    case Wedge::OmegaPlus:
    case Wedge::OmegaMinus: {
        const T lam = interp_lambda(f, p, wedge_side(w));
        return xi_aux_interface(sc, f, p, t, band) * lam + xi_aux_boundary(sc, f, p) * (1.0 - lam);
    }
    default: throw CalibrationDomainMiss("point outside the wedge decomposition of a contact point");
    }
}

/// Normalized contact field ξ^c = ξ̂^c / |ξ̂^c|.
template <class T> Vec2<T> xi_contact(const Scene& sc, const ContactFrame<T>& f, const Vec2<T>& p, const T& t,
                                      double band = 2.0) {
    const Vec2<T> h = xi_contact_hat(sc, f, p, t, band);
    const T len = norm(h);
    if (value(len) < 0.5) throw NormalizationUnsafe("|xi_hat| = " + std::to_string(value(len)) + " < 1/2");
    return h / len;
}

/// Convenience evaluation with derivatives at (p, t).
inline VectorDerivs xi_contact_derivs(const Scene& sc, ContactId id, const Vec2d& p, double t) {
    const Jet3 tj = seed_time(t);
    const auto f = contact_frame<Jet3>(sc, id.interface, id.end, tj);
    return unpack(xi_contact<Jet3>(sc, f, seed_point(p), tj));
}

inline ScalarDerivs lambda_derivs(const Scene& sc, ContactId id, const Vec2d& p, double t, int side) {
    const Jet3 tj = seed_time(t);
    const auto f = contact_frame<Jet3>(sc, id.interface, id.end, tj);
    return unpack(interp_lambda<Jet3>(f, seed_point(p), side));
}

} // namespace calib
