#pragma once

// Localization radii by bisection over sampled geometric predicates.

#include "calib/calibration_contact.hpp"

#include <functional>
#include <vector>

namespace calib {

struct Radii {
    std::vector<double> r_i;       ///< per interface
    std::vector<ContactId> contacts;
    std::vector<double> r_c;       ///< per contact
    std::vector<double> r_hat_c;   ///< per contact
    std::vector<double> dist_constant; ///< constant of the dominance condition per contact
    double r_hat = 0.0;
    double delta = 0.25;
};

struct RadiiOptions {
    int time_slices = 5;
    double rel_tol = 1e-3;
    double min_xi_hat = 0.55;
    double max_dist_constant = 8.0;
};

inline std::vector<double> time_slices(double horizon, int n) {
    if (horizon <= 0.0 || n < 2) return {0.0};
    std::vector<double> ts(n);
    for (int k = 0; k < n; ++k) ts[k] = horizon * k / (n - 1);
    return ts;
}

/// Largest r in (0, hi] with pred(r), assuming pred is monotone decreasing in r.
inline double largest_passing(const std::function<bool(double)>& pred, double hi, double rel_tol) {
    if (pred(hi)) return hi;
    double bad = hi, good = hi;
    for (int k = 0; k < 40; ++k) {
        good *= 0.5;
        if (pred(good)) break;
        bad = good;
        if (k == 39) throw DegenerateGeometry("no positive radius passes the admissibility checks");
    }
    while (bad - good > rel_tol * good) {
        const double mid = 0.5 * (good + bad);
        if (pred(mid)) good = mid;
        else bad = mid;
    }
    return good;
}

namespace detail {

inline bool interface_band_ok(const Scene& sc, int i, double r, const std::vector<double>& ts) {
    const CurveFamily& cf = *sc.interfaces[i];
    const int ns = 40, nk = 12;
    const double diam = sc.diameter();
    for (double t : ts) {
        for (int j = 0; j < ns; ++j) {
            const double sg = cf.s_begin() + (cf.s_end() - cf.s_begin()) * (j + 0.5) / ns;
            const CurvePoint cp = cf.eval(sg, t);
            const Vec2d n = rperp(Vec2d(cp.d1.normalized()));
            for (int k = 1; k <= nk; ++k) {
                for (int sign : {-1, 1}) {
                    const double s = sign * 2.0 * r * 0.999 * k / nk;
                    const Vec2d x = cp.p + s * n;
                    if (!inside_domain(sc, x)) continue;
                    const Projection pr = project(cf, x, t);
                    if (pr.beyond_end || (pr.cp.p - cp.p).norm() > 1e-6 * diam) return false;
                    for (int o = 0; o < int(sc.interfaces.size()); ++o)
                        if (o != i && project(*sc.interfaces[o], x, t).distance <= std::abs(s)) return false;
                }
            }
        }
    }
    return true;
}

/// Wedge inclusions and dominance constant on B_r(c); returns the constant or a
/// negative value on failure.
inline double wedge_checks(const Scene& sc, ContactId id, double r, double band, const std::vector<double>& ts) {
    const CurveFamily& cf = *sc.interfaces[id.interface];
    double C = 0.0;
    for (double t : ts) {
        const auto f = contact_frame<double>(sc, id.interface, id.end, t);
        const int nr = 12, na = 72;
        for (int k = 1; k <= nr; ++k) {
            const double rho = r * k / nr;
            for (int j = 0; j < na; ++j) {
                const double a = -kPi + 2.0 * kPi * (j + 0.5) / na;
                const Vec2d x = f.c + rho * (std::cos(a) * f.n_b + std::sin(a) * f.tau_b);
                if (!inside_domain(sc, x)) continue;
                const Wedge w = classify_direction(x, f);
                if (w == Wedge::Uncovered) return -1.0;
                try {
                    if (w == Wedge::Interface) {
                        interface_chart(sc, id.interface, x, t, band);
                        continue;
                    }
                    const int side = wedge_side(w);
                    const int ph = nearest_interface(sc, x, t).phase();
                    if ((side == 0) != (ph > 0)) return -1.0;
                    boundary_chart(sc, x);
                    if (is_omega_wedge(w)) interface_chart(sc, id.interface, x, t, band);
                } catch (const OutsideTubularBand&) {
                    return -1.0;
                }
                const double dT = project(cf, x, t).distance;
                C = std::max(C, rho / std::max(dT, 1e-300));
            }
        }
        const int nsmp = 200;
        for (int j = 0; j <= nsmp; ++j) {
            const double sg = cf.s_begin() + (cf.s_end() - cf.s_begin()) * j / nsmp;
            const Vec2d x = cf.eval(sg, t).p;
            const double d = (x - f.c).norm();
            if (d > 1e-12 && d <= r && classify_direction(x, f) != Wedge::Interface) return -1.0;
        }
        const int nb = 720;
        for (int j = 0; j < nb; ++j) {
            const Vec2d x = sc.boundary->eval(sc.boundary->s_begin() + (sc.boundary->s_end() - sc.boundary->s_begin()) * j / nb, 0.0).p;
            const double d = (x - f.c).norm();
            if (d > 1e-12 && d <= r && !is_boundary_wedge(classify_direction(x, f))) return -1.0;
        }
    }
    return C;
}

inline double min_xi_hat(const Scene& sc, ContactId id, double r, double band, const std::vector<double>& ts) {
    double m = 1e300;
    for (double t : ts) {
        const auto f = contact_frame<double>(sc, id.interface, id.end, t);
        const int nr = 16, na = 72;
        for (int k = 1; k <= nr; ++k) {
            const double rho = r * k / nr;
            for (int j = 0; j < na; ++j) {
                const double a = -kPi + 2.0 * kPi * (j + 0.5) / na;
                const Vec2d x = f.c + rho * (std::cos(a) * f.n_b + std::sin(a) * f.tau_b);
                if (!inside_domain(sc, x)) continue;
                m = std::min(m, xi_contact_hat<double>(sc, f, x, t, band).norm());
            }
        }
    }
    return m;
}

inline double min_pair_distance(const std::vector<Vec2d>& a, const std::vector<Vec2d>& b) {
    double d = 1e300;
    for (const auto& x : a)
        for (const auto& y : b) d = std::min(d, (x - y).norm());
    return d;
}

inline std::vector<Vec2d> sample_curve(const CurveFamily& c, double t, int n) {
    std::vector<Vec2d> pts;
    for (int j = 0; j <= n; ++j) pts.push_back(c.eval(c.s_begin() + (c.s_end() - c.s_begin()) * j / n, t).p);
    return pts;
}

inline bool localization_ok(const Scene& sc, const std::vector<ContactId>& ids, double r,
                            const std::vector<double>& ts) {
    for (double t : ts) {
        std::vector<std::vector<Vec2d>> curves;
        for (const auto& c : sc.interfaces) curves.push_back(sample_curve(*c, t, 400));
        std::vector<Vec2d> cs;
        for (const auto& id : ids) cs.push_back(sc.interfaces[id.interface]->eval(
            id.end == 0 ? sc.interfaces[id.interface]->s_begin() : sc.interfaces[id.interface]->s_end(), t).p);
        for (size_t i = 0; i < curves.size(); ++i)
            for (size_t j = i + 1; j < curves.size(); ++j)
                if (min_pair_distance(curves[i], curves[j]) <= 2.0 * r) return false;
        for (size_t k = 0; k < ids.size(); ++k) {
            for (size_t i = 0; i < curves.size(); ++i)
                if (int(i) != ids[k].interface && min_pair_distance({cs[k]}, curves[i]) <= 2.0 * r) return false;
            for (size_t l = k + 1; l < ids.size(); ++l)
                if ((cs[k] - cs[l]).norm() <= 2.0 * r) return false;
        }
    }
    return true;
}

} // namespace detail

/// Radii r_i, r_c, r̂_c and r̂ (δ is left at its default; see choose_delta).
inline Radii estimate_localization_radii(const Scene& sc, const RadiiOptions& opt = {}) {
    const auto ts = time_slices(sc.horizon, opt.time_slices);
    Radii R;
    for (int i = 0; i < int(sc.interfaces.size()); ++i)
        R.r_i.push_back(largest_passing([&](double r) { return detail::interface_band_ok(sc, i, r, ts); }, 1.0,
                                        opt.rel_tol));
    R.contacts = contact_ids(sc);
    for (const auto& id : R.contacts) {
        for (double t : ts) contact_frame<double>(sc, id.interface, id.end, t); // angle validation
        const double band = 2.0 * R.r_i[id.interface];
        const double rc = largest_passing(
            [&](double r) {
                const double C = detail::wedge_checks(sc, id, r, band, ts);
                return C >= 0.0 && C <= opt.max_dist_constant;
            },
            R.r_i[id.interface], opt.rel_tol);
        R.r_c.push_back(rc);
        R.dist_constant.push_back(detail::wedge_checks(sc, id, rc, band, ts));
        R.r_hat_c.push_back(largest_passing(
            [&](double r) {
                try {
                    return detail::min_xi_hat(sc, id, r, band, ts) >= opt.min_xi_hat;
                } catch (const Error&) {
                    return false;
                }
            },
            rc, opt.rel_tol));
    }
    double r = 1.0;
    for (double x : R.r_i) r = std::min(r, x);
    for (double x : R.r_hat_c) r = std::min(r, x);
    r *= 0.95;
    int guard = 0;
    while (!detail::localization_ok(sc, R.contacts, r, ts)) {
        r *= 0.9;
        if (++guard > 200) throw DegenerateGeometry("no admissible global radius");
    }
    R.r_hat = sc.r_hat.value_or(r);
    if (sc.delta) R.delta = *sc.delta;
    return R;
}

} // namespace calib
