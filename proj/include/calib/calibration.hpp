#pragma once

// Assembly of a calibration for a scene: radii, then δ.

#include "calib/weights.hpp"

namespace calib {

namespace detail {

/// Largest jump of ξ and ϑ over pairs straddling the r̂-ball edges and the band edges.
inline double seam_jump(const Calibration& cal, const std::vector<double>& ts) {
    const Scene& sc = cal.scene();
    const double rh = cal.r_hat(), h = 1e-9;
    double jump = 0.0;
    auto pair = [&](const Vec2d& a, const Vec2d& b, double t) {
        if (!inside_domain(sc, a) || !inside_domain(sc, b)) return;
        jump = std::max(jump, (cal.xi(a, t) - cal.xi(b, t)).norm());
        jump = std::max(jump, std::abs(theta_weight(cal, a, t) - theta_weight(cal, b, t)));
    };
    for (double t : ts) {
        for (const auto& id : cal.radii().contacts) {
            const auto f = contact_frame<double>(sc, id.interface, id.end, t);
            for (int j = 0; j < 180; ++j) {
                const double a = -kPi + 2.0 * kPi * (j + 0.5) / 180;
                const Vec2d e = std::cos(a) * f.n_b + std::sin(a) * f.tau_b;
                pair(f.c + (rh - h) * e, f.c + (rh + h) * e, t);
            }
        }
        for (int i = 0; i < int(sc.interfaces.size()); ++i) {
            const CurveFamily& cf = *sc.interfaces[i];
            for (int j = 0; j < 100; ++j) {
                const CurvePoint cp = cf.eval(cf.s_begin() + (cf.s_end() - cf.s_begin()) * (j + 0.5) / 100, t);
                const Vec2d n = rperp(Vec2d(cp.d1.normalized()));
                for (int sg : {-1, 1}) pair(cp.p + sg * (rh - h) * n, cp.p + sg * (rh + h) * n, t);
            }
        }
        for (int j = 0; j < 200; ++j) {
            const CurvePoint cp = sc.boundary->eval(sc.boundary->s_begin() +
                                                    (sc.boundary->s_end() - sc.boundary->s_begin()) * j / 200, 0.0);
            const Vec2d n = perp(Vec2d(cp.d1.normalized()));
            pair(cp.p + (rh - h) * n, cp.p + (rh + h) * n, t);
        }
    }
    return jump;
}

} // namespace detail

/// Radii by bisection; δ shrinks from 1/4 by factor 0.8 until ξ and ϑ are
/// continuous across the seams of the construction.
inline Calibration make_calibration(const Scene& sc, const RadiiOptions& opt = {}) {
    Radii R = estimate_localization_radii(sc, opt);
    const auto ts = time_slices(sc.horizon, 3);
    for (int k = 0; k < 20; ++k) {
        Calibration cal(sc, R);
        try {
            if (detail::seam_jump(cal, ts) <= 1e-6) return cal;
        } catch (const Error&) {
        }
        if (sc.delta) break;
        R.delta *= 0.8;
    }
    throw DegenerateGeometry("no admissible delta: the calibration is discontinuous across its seams");
}

} // namespace calib
