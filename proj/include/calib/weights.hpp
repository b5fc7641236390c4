#pragma once

// Transported weight ϑ: signed, vanishing on I_v ∪ ∂Ω, negative in Ω⁺.

#include "calib/calibration_global.hpp"

namespace calib {

/// Auxiliary weight near interface i: -θ̄(s_i / (δ r̂)).
template <class T> T weight_interface(const Calibration& cal, const PointContext<T>& ctx, int i) {
    return -profile::theta_bar(T(ctx.iface[i]->s / cal.scale()));
}

/// Auxiliary weight near the boundary on the given side: ∓θ̄(s_∂Ω / (δ r̂)).
template <class T> T weight_boundary(const Calibration& cal, const PointContext<T>& ctx, int side) {
    if (!ctx.bnd) throw CalibrationDomainMiss("boundary chart undefined for the boundary weight");
    const T w = profile::theta_bar(T(ctx.bnd->s / cal.scale()));
    return side == 0 ? T(-w) : w;
}

template <class T> T theta_weight(const Calibration& cal, const PointContext<T>& ctx, const Vec2<T>& p,
                                  const T& t) {
    const Scene& sc = cal.scene();
    const double rh = cal.r_hat();
    // Outside the contact balls the interface profile is used only where it is not
    // saturated; elsewhere the boundary profile or the bulk value takes over. The
    // saturated values agree, and ϑ keeps vanishing on the part of ∂Ω that lies in
    // the interface band.
    if (ctx.ball >= 0) {
        const int k = ctx.ball;
        const Wedge w = ctx.wedge[k];
        const int i = cal.radii().contacts[k].interface;
        if (w == Wedge::Interface) {
            if (!ctx.iface[i]) throw CalibrationDomainMiss("interface chart undefined in the interface wedge");
            return weight_interface(cal, ctx, i);
        }
        if (is_boundary_wedge(w)) return weight_boundary(cal, ctx, wedge_side(w));
        if (is_omega_wedge(w)) {
            if (!ctx.iface[i]) throw CalibrationDomainMiss("interface chart undefined in an interpolation wedge");
            const T lam = interp_lambda(ctx.frames[k], p, wedge_side(w));
            return lam * weight_interface(cal, ctx, i) + (1.0 - lam) * weight_boundary(cal, ctx, wedge_side(w));
        }
        throw CalibrationDomainMiss("point outside the wedge decomposition of a contact point");
    }
    for (int i = 0; i < int(sc.interfaces.size()); ++i) {
        const auto& ch = ctx.iface[i];
        if (!ch || std::abs(value(ch->s)) >= cal.scale()) continue;
        const CurveFamily& cf = *sc.interfaces[i];
        if (!cf.closed() && (ch->sigma < cf.s_begin() || ch->sigma > cf.s_end())) continue;
        return weight_interface(cal, ctx, i);
    }
    const int side = nearest_interface(sc, value(p), value(t)).phase() > 0 ? 0 : 1;
    if (ctx.bnd && value(ctx.bnd->s) <= rh) return weight_boundary(cal, ctx, side);
    return T(side == 0 ? -1.0 : 1.0);
}

template <class T> T theta_weight(const Calibration& cal, const Vec2<T>& p, const T& t) {
    return theta_weight(cal, cal.context(p, t), p, t);
}

inline double theta_weight(const Calibration& cal, const Vec2d& p, double t) {
    return theta_weight<double>(cal, p, t);
}

inline ScalarDerivs theta_weight_derivs(const Calibration& cal, const Vec2d& p, double t) {
    return unpack(theta_weight<Jet3>(cal, seed_point(p), seed_time(t)));
}

} // namespace calib
