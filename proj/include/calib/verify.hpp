#pragma once

// Verification suites: sampled residuals, order fits along rays, fitted constants.

#include "calib/functionals.hpp"

#include <map>
#include <random>
#include <string>

namespace calib {

// ---------------------------------------------------------------- fits and reports

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    int points = 0;
    bool exact = false; ///< every residual below 1e-10: no order to fit
    bool passes(double min_slope) const { return exact || slope >= min_slope; }
};

/// Least-squares line through (log x, log y) over the positive samples.
inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit f;
    for (double v : y) f.max_residual = std::max(f.max_residual, v);
    if (f.max_residual < 1e-10) {
        f.exact = true;
        return f;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        if (!(y[k] > 1e-300) || !(x[k] > 0.0)) continue;
        const double a = std::log(x[k]), b = std::log(y[k]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
        ++f.points;
    }
    if (f.points < 3) throw DegenerateFit("fewer than three positive samples for an order fit");
    const double n = f.points;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

struct Check {
    std::string id;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    std::map<std::string, double> constants;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(std::string id, bool pass, double value, double threshold, std::string note = {}) {
        checks.push_back({std::move(id), pass, value, threshold, std::move(note)});
    }
    void add_fit(const std::string& id, const SlopeFit& f, double min_slope) {
        add(id, f.passes(min_slope), f.exact ? 0.0 : f.slope, min_slope,
            f.exact ? "exact (max residual " + fmt(f.max_residual) + ")" : "slope over " + std::to_string(f.points) +
                                                                            " envelope points");
    }
    static std::string fmt(double x) {
        char b[32];
        std::snprintf(b, sizeof b, "%.3e", x);
        return b;
    }
};

/// Log-spaced distances in [lo, hi].
inline std::vector<double> log_distances(double lo = 1e-3, double hi = 1e-1, int n = 13) {
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) d[k] = lo * std::pow(hi / lo, double(k) / (n - 1));
    return d;
}

/// Envelope (max over rays) of residuals sampled at common distances.
class Envelope {
public:
    explicit Envelope(std::vector<double> d) : d_(std::move(d)), m_(d_.size(), 0.0) {}
    void add(size_t k, double r) { m_[k] = std::max(m_[k], std::abs(r)); }
    const std::vector<double>& distances() const { return d_; }
    SlopeFit fit() const { return fit_loglog(d_, m_); }
    /// Fit restricted to distances ≤ d_max (at least three levels).
    SlopeFit fit_below(double d_max) const {
        std::vector<double> d, m;
        for (size_t k = 0; k < d_.size(); ++k)
            if (d_[k] <= d_max || d.size() < 3) {
                d.push_back(d_[k]);
                m.push_back(m_[k]);
            }
        return fit_loglog(d, m);
    }

private:
    std::vector<double> d_, m_;
};

struct VerifyOptions {
    int boundary_samples = 1000;
    int interface_samples = 1000;
    int length_samples = 10000;
    int sign_samples = 10000;
    int identity_samples = 10000;
    double fd_step = 1e-5;
    int time_slices = 3;
    std::uint64_t seed = 20240607;
};

/// Interface points (σ sampled uniformly) with their unit normal.
inline std::vector<std::pair<Vec2d, Vec2d>> interface_samples(const Scene& sc, int i, double t, int n,
                                                              double trim = 0.0) {
    const CurveFamily& cf = *sc.interfaces.at(i);
    std::vector<std::pair<Vec2d, Vec2d>> out;
    const double a = cf.s_begin(), L = cf.s_end() - cf.s_begin();
    for (int k = 0; k < n; ++k) {
        const double u = trim + (1.0 - 2.0 * trim) * (k + 0.5) / n;
        const CurvePoint cp = cf.eval(a + L * u, t);
        out.push_back({cp.p, rperp(Vec2d(cp.d1.normalized()))});
    }
    return out;
}

/// Normal speed of the interface against v·n (zero for a family transported by v).
inline double normal_speed_mismatch(const Scene& sc, double t) {
    double m = 0.0;
    for (const auto& cf : sc.interfaces)
        for (int k = 0; k < 64; ++k) {
            const CurvePoint cp = cf->eval(cf->s_begin() + (cf->s_end() - cf->s_begin()) * (k + 0.5) / 64, t);
            const Vec2d n = rperp(Vec2d(cp.d1.normalized()));
            m = std::max(m, std::abs((cp.pt - sc.velocity(cp.p, t)).dot(n)));
        }
    return m;
}

inline void require_transported(const Scene& sc, const std::vector<double>& ts) {
    for (double t : ts)
        if (const double m = normal_speed_mismatch(sc, t); m > 1e-8)
            throw FixtureInconsistent("interface normal speed differs from v·n by " + std::to_string(m));
}

// ---------------------------------------------------------------- bulk extension

inline SuiteReport verify_bulk_properties(const Scene& sc, int i, const VerifyOptions& opt = {}) {
    const auto ts = time_slices(sc.horizon, opt.time_slices);
    require_transported(sc, ts);
    SuiteReport rep;
    rep.suite = "bulk-extension-" + std::to_string(i);
    rep.columns = {"t", "x1", "x2", "dist", "div_residual", "transport_residual", "length_residual"};
    Envelope div(log_distances()), tr(log_distances());
    double unit = 0.0, len = 0.0;
    for (double t : ts)
        for (const auto& [p0, n] : interface_samples(sc, i, t, 9, 0.05))
            for (int sg : {-1, 1})
                for (size_t k = 0; k < div.distances().size(); ++k) {
                    const double d = div.distances()[k];
                    const Vec2d p = p0 + sg * d * n;
                    const VectorDerivs X = xi_bulk_derivs(sc, i, p, t);
                    const VectorDerivs v = sc.velocity.derivs(p, t);
                    const double H = interface_curvature_at(sc, i, p, t);
                    const double rd = X.divergence() + H;
                    const double rt = transport_residual(X, v).norm();
                    const double rl = length_evolution(X, v);
                    div.add(k, rd);
                    tr.add(k, rt);
                    unit = std::max(unit, std::abs(X.value.norm() - 1.0));
                    len = std::max(len, std::abs(rl));
                    rep.rows.push_back({t, p(0), p(1), d, rd, rt, rl});
                }
    rep.add("unit-length", unit <= 1e-12, unit, 1e-12);
    rep.add_fit("divergence-order", div.fit(), 0.9);
    rep.add_fit("transport-order", tr.fit(), 0.9);
    rep.add("length-evolution", len <= 1e-10, len, 1e-10);
    return rep;
}

// ---------------------------------------------------------------- contact extension

/// |ξ̂_aux|² - (1 + ¼ α⁴ s⁴) for both building blocks at random points of the contact ball.
inline double aux_identity_residual(const Calibration& cal, int samples, std::uint64_t seed) {
    const Scene& sc = cal.scene();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    const auto& R = cal.radii();
    for (int k = 0; k < samples; ++k) {
        const int c = int(U(rng) * R.contacts.size()) % int(R.contacts.size());
        const double t = U(rng) * sc.horizon;
        const auto f = contact_frame<double>(sc, R.contacts[c].interface, R.contacts[c].end, t);
        const double r = std::min(R.r_c[c], sc.boundary_tube) * std::sqrt(U(rng)), a = 2.0 * kPi * U(rng);
        const Vec2d p = f.c + r * unit_dir(a);
        if (!inside_domain(sc, p)) {
            --k;
            continue;
        }
        const auto ci = interface_chart<double>(sc, f.interface, p, t);
        const Vec2d xi = xi_aux_interface(sc, f, p, t);
        worst = std::max(worst, std::abs(xi.squaredNorm() - (1.0 + 0.25 * std::pow(f.alpha_T * ci.s, 4))));
        const auto cb = boundary_chart<double>(sc, p, f.boundary_orient);
        const Vec2d xb = xi_aux_boundary(sc, f, p);
        worst = std::max(worst, std::abs(xb.squaredNorm() - (1.0 + 0.25 * std::pow(f.alpha_B * cb.s, 4))));
    }
    return worst;
}

inline SuiteReport verify_contact_properties(const Calibration& cal, int c, const VerifyOptions& opt = {}) {
    const Scene& sc = cal.scene();
    const auto ts = time_slices(sc.horizon, opt.time_slices);
    require_transported(sc, ts);
    const ContactId id = cal.radii().contacts.at(c);
    SuiteReport rep;
    rep.suite = "contact-extension-" + std::to_string(id.interface) + "-" + std::to_string(id.end);
    rep.columns = {"t", "angle", "rho", "transport", "length", "compat1", "compat2", "first_order", "aux_length"};
    const auto D = log_distances();
    Envelope tr(D), c1(D), c2(D), fo(D), al(D), lam_adv(D), lam_grad(D);
    double len = 0.0, lam_grad_min = 1e300;
    for (double t : ts) {
        const auto f = contact_frame<double>(sc, id.interface, id.end, t);
        const int i = id.interface;
        // directions measured from n_∂Ω towards τ_∂Ω, avoiding the interface itself
        for (double deg : {-110.0, -75.0, -50.0, -40.0, -20.0, -10.0, 10.0, 20.0, 40.0, 50.0, 75.0, 110.0}) {
            const double a = deg * kPi / 180.0;
            const Vec2d e = std::cos(a) * f.n_b + std::sin(a) * f.tau_b;
            const Wedge w = classify_direction(Vec2d(f.c + 1e-3 * e), f);
            for (size_t k = 0; k < D.size(); ++k) {
                const Vec2d p = f.c + D[k] * e;
                if (!inside_domain(sc, p)) continue;
                const VectorDerivs X = xi_contact_derivs(sc, id, p, t);
                const VectorDerivs v = sc.velocity.derivs(p, t);
                const double rl = length_evolution(X, v);
                len = std::max(len, std::abs(rl));
                const Vec2d ai = xi_aux_interface(sc, f, p, t), ab = xi_aux_boundary(sc, f, p);
                const double rfo = (ai - ab).norm();
                fo.add(k, rfo);
                const auto ci = interface_chart<double>(sc, i, p, t);
                const double ral = std::abs(1.0 - ai.squaredNorm());
                al.add(k, ral);
                double rt = 0.0, r1 = 0.0, r2 = 0.0;
                if (w == Wedge::Interface || is_omega_wedge(w)) {
                    rt = transport_residual(X, v).norm();
                    const Vec2d xb = xi_bulk(sc, i, p, t);
                    r1 = (xb - X.value).norm();
                    r2 = std::abs(xb.dot(xb - X.value));
                    tr.add(k, rt);
                    c1.add(k, r1);
                    c2.add(k, r2);
                }
                if (is_omega_wedge(w)) {
                    const ScalarDerivs L = lambda_derivs(sc, id, p, t, wedge_side(w));
                    lam_adv.add(k, L.advective(v.value) / 1.0);
                    lam_grad.add(k, L.grad.norm() * D[k]);
                }
                (void)ci;
                rep.rows.push_back({t, deg, D[k], rt, rl, r1, r2, rfo, ral});
            }
        }
        // λ gradient blow-up rate: sup over the Ω wedges of |∇λ| · |p - c| at each distance
        for (size_t k = 0; k < D.size(); ++k) {
            double m = 0.0;
            for (int j = 1; j < 20; ++j)
                for (int side : {0, 1}) {
                    const double a = (side == 0 ? 1.0 : -1.0) * (kPi / 6.0 + (kPi / 6.0) * j / 20.0);
                    const Vec2d p = f.c + D[k] * (std::cos(a) * f.n_b + std::sin(a) * f.tau_b);
                    m = std::max(m, lambda_derivs(sc, id, p, t, side).grad.norm() * D[k]);
                }
            lam_grad_min = std::min(lam_grad_min, m);
        }
    }
    rep.add_fit("transport-order", tr.fit(), 0.9);
    rep.add("length-evolution", len <= 1e-10, len, 1e-10);
    rep.add_fit("compat-bulk-order1", c1.fit(), 0.9);
    rep.add_fit("compat-bulk-order2", c2.fit(), 1.9);
    rep.add_fit("first-order-compat-at-c", fo.fit(), 1.9);
    rep.add_fit("aux-length-order4", al.fit(), 3.9);
    const double idr = aux_identity_residual(cal, opt.identity_samples / 10, opt.seed + c);
    rep.add("aux-length-identity", idr <= 1e-12, idr, 1e-12);

    // λ: advective derivative bounded while |∇λ| ~ 1/dist
    SlopeFit adv = lam_adv.fit();
    double adv_max = adv.max_residual;
    rep.constants["lambda_advective_sup"] = adv_max;
    rep.constants["lambda_grad_dist_inf"] = lam_grad_min;
    rep.add("lambda-advective-bounded", std::isfinite(adv_max) && (adv.exact || adv.slope > -0.1), adv_max, 0.0,
            "sup |dt lambda + v.grad lambda| over rays; slope " + SuiteReport::fmt(adv.slope));
    rep.add("lambda-gradient-scaling", lam_grad_min > 0.0 && std::isfinite(lam_grad_min), lam_grad_min, 0.0,
            "inf over distances of sup |grad lambda| * dist");

    // continuity of ξ^c across the shared rays of the wedges
    double jump = 0.0;
    for (double t : ts) {
        const auto f = contact_frame<double>(sc, id.interface, id.end, t);
        for (double a0 : {kPi / 6.0, kPi / 3.0, 2.0 * kPi / 3.0})
            for (int sg : {-1, 1})
                for (double r : {1e-3, 1e-2, 0.1, 0.5 * cal.radii().r_hat_c[c]}) {
                    const double eta = 1e-11;
                    auto at = [&](double a) {
                        return Vec2d(f.c + r * (std::cos(sg * a) * f.n_b + std::sin(sg * a) * f.tau_b));
                    };
                    const Vec2d p = at(a0 - eta), q = at(a0 + eta);
                    if (!inside_domain(sc, p) || !inside_domain(sc, q)) continue;
                    jump = std::max(jump, (xi_contact(sc, f, p, t) - xi_contact(sc, f, q, t)).norm());
                }
    }
    rep.add("wedge-continuity", jump <= 1e-8, jump, 1e-8);
    return rep;
}

// ---------------------------------------------------------------- calibration field

/// Rays used for order fits: normals from interface points and rays from contact points.
template <class F> void for_each_ray_point(const Calibration& cal, const std::vector<double>& ts,
                                           const std::vector<double>& D, F&& f) {
    const Scene& sc = cal.scene();
    for (double t : ts) {
        for (int i = 0; i < int(sc.interfaces.size()); ++i)
            for (const auto& [p0, n] : interface_samples(sc, i, t, 11, 0.02))
                for (int sg : {-1, 1})
                    for (size_t k = 0; k < D.size(); ++k) {
                        const Vec2d p = p0 + sg * D[k] * n;
                        if (inside_domain(sc, p)) f(p, t, k);
                    }
        for (const auto& id : cal.radii().contacts) {
            const auto fr = contact_frame<double>(sc, id.interface, id.end, t);
            for (double deg : {-100.0, -60.0, -35.0, -15.0, 15.0, 35.0, 60.0, 100.0}) {
                const double a = deg * kPi / 180.0;
                const Vec2d e = std::cos(a) * fr.n_b + std::sin(a) * fr.tau_b;
                for (size_t k = 0; k < D.size(); ++k) {
                    const Vec2d p = fr.c + D[k] * e;
                    if (inside_domain(sc, p)) f(p, t, k);
                }
            }
        }
    }
}

inline SuiteReport verify_calibration_field(const Calibration& cal, const VerifyOptions& opt = {}) {
    const Scene& sc = cal.scene();
    const auto ts = time_slices(sc.horizon, opt.time_slices);
    require_transported(sc, ts);
    SuiteReport rep;
    rep.suite = "calibration";
    rep.columns = {"t", "x1", "x2", "rho", "transport", "length", "eta_bulk_advection"};

    // (a) length bound
    const double C = xi_length_constant(cal, ts);
    rep.constants["length_bound_C"] = C;
    rep.add("length-bound-constant", C > 0.0 && std::isfinite(C), C, 0.0, "largest C with |xi| <= 1 - C dist^2");

    // (b) tangential on ∂Ω
    double bnd = 0.0;
    {
        const CurveFamily& b = *sc.boundary;
        const int n = opt.boundary_samples;
        for (int k = 0; k < n; ++k) {
            const double t = ts[k % ts.size()];
            const CurvePoint cp = b.eval(b.s_begin() + (b.s_end() - b.s_begin()) * (k + 0.5) / n, 0.0);
            const Vec2d nb = perp(Vec2d(cp.d1.normalized()));
            bnd = std::max(bnd, std::abs(cal.xi(cp.p, t).dot(nb)));
        }
    }
    rep.add("boundary-tangency", bnd <= 1e-10, bnd, 1e-10);

    // (c) ξ = n and FD divergence = -H on I_v
    double ext = 0.0, dv = 0.0, pou = 0.0;
    {
        const int ni = int(sc.interfaces.size());
        const int per = std::max(1, opt.interface_samples / (ni * int(ts.size())));
        const double h = opt.fd_step;
        for (double t : ts)
            for (int i = 0; i < ni; ++i)
                for (const auto& [p, n] : interface_samples(sc, i, t, per)) {
                    ext = std::max(ext, (cal.xi(p, t) - n).norm());
                    const double div = (cal.xi(Vec2d(p + Vec2d(h, 0)), t)(0) - cal.xi(Vec2d(p - Vec2d(h, 0)), t)(0) +
                                        cal.xi(Vec2d(p + Vec2d(0, h)), t)(1) - cal.xi(Vec2d(p - Vec2d(0, h)), t)(1)) /
                                       (2.0 * h);
                    dv = std::max(dv, std::abs(div + interface_curvature_at(sc, i, p, t)));
                    pou = std::max(pou, std::abs(cal.cutoffs<double>(p, t).sum() - 1.0));
                }
    }
    rep.add("extends-normal", ext <= 1e-6, ext, 1e-6);
    rep.add("divergence-curvature", dv <= 1e-6, dv, 1e-6, "central differences, h = " + SuiteReport::fmt(opt.fd_step));
    rep.add("partition-of-unity-on-interface", pou <= 1e-10, pou, 1e-10);

    // (d), (e), (f) order fits along rays
    const auto D = log_distances();
    Envelope tr(D), le(D), eb(D);
    for_each_ray_point(cal, ts, D, [&](const Vec2d& p, double t, size_t k) {
        const VectorDerivs X = cal.xi_derivs(p, t);
        const VectorDerivs v = sc.velocity.derivs(p, t);
        const ScalarDerivs e = cal.eta_bulk_derivs(p, t);
        const double rt = transport_residual(X, v).norm(), rl = length_evolution(X, v), re = e.advective(v.value);
        tr.add(k, rt);
        le.add(k, rl);
        eb.add(k, re);
        rep.rows.push_back({t, p(0), p(1), D[k], rt, rl, re});
    });
    // the O(dist^k ∧ 1) bounds are asymptotic: fit where the cutoff profiles are unsaturated
    const double dmax = 0.5 * cal.scale();
    rep.constants["fit_max_distance"] = std::min(dmax, D.back());
    rep.add_fit("transport-order", tr.fit_below(dmax), 0.9);
    rep.add_fit("length-evolution-order", le.fit_below(dmax), 1.9);
    rep.add_fit("bulk-cutoff-advection-order", eb.fit_below(dmax), 1.9);

    // bulk cutoff two-sided bound against dist² ∧ 1
    double lo = 1e300, hi = 0.0;
    for (double t : ts)
        for (int i = 1; i <= 40; ++i)
            for (int j = 0; j < 90; ++j) {
                const double R = sc.is_disk() ? sc.disk_radius : 0.5 * sc.diameter();
                const Vec2d p = R * (i - 0.5) / 40.0 * unit_dir(2.0 * kPi * (j + 0.5) / 90.0);
                if (!inside_domain(sc, p)) continue;
                const double d = interface_distance(sc, p, t);
                if (d < 1e-3) continue;
                const double q = std::min(d * d, 1.0);
                const double e = cal.cutoffs<double>(p, t).eta_bulk;
                lo = std::min(lo, e / q);
                hi = std::max(hi, e / q);
            }
    rep.constants["eta_bulk_lower"] = lo;
    rep.constants["eta_bulk_upper"] = hi;
    rep.add("bulk-cutoff-coercivity", lo > 0.0 && std::isfinite(hi), lo, 0.0,
            "eta_bulk / (dist^2 ^ 1) in [" + SuiteReport::fmt(lo) + ", " + SuiteReport::fmt(hi) + "]");
    return rep;
}

// ---------------------------------------------------------------- transported weight

/// sup |∂_t ϑ + v·∇ϑ| / |ϑ| on a polar grid of the given resolution.
inline double weight_transport_constant(const Calibration& cal, const std::vector<double>& ts, int nr, int nphi) {
    const Scene& sc = cal.scene();
    const double R = sc.is_disk() ? sc.disk_radius : 0.5 * sc.diameter();
    double C = 0.0;
    for (double t : ts) {
        const auto frames = locate_contact_points(sc, t);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nphi; ++j) {
                const Vec2d p = R * (i + 0.5) / nr * unit_dir(2.0 * kPi * (j + 0.5) / nphi);
                if (!inside_domain(sc, p)) continue;
                bool near_c = false;
                for (const auto& f : frames) near_c = near_c || (p - f.c).norm() < 1e-3;
                if (near_c) continue;
                const ScalarDerivs w = theta_weight_derivs(cal, p, t);
                if (std::abs(w.value) < 1e-12) continue;
                C = std::max(C, std::abs(w.advective(sc.velocity(p, t))) / std::abs(w.value));
            }
    }
    return C;
}

inline SuiteReport verify_weight_field(const Calibration& cal, const VerifyOptions& opt = {}) {
    const Scene& sc = cal.scene();
    const auto ts = time_slices(sc.horizon, opt.time_slices);
    require_transported(sc, ts);
    SuiteReport rep;
    rep.suite = "weight";
    rep.columns = {"t", "x1", "x2", "class", "theta"};
    const double R = sc.is_disk() ? sc.disk_radius : 0.5 * sc.diameter();

    // (c) sign pattern: interior samples by phase, plus I_v and ∂Ω samples
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n_iface = opt.sign_samples / 20, n_bnd = opt.sign_samples / 20;
    const int n_bulk = opt.sign_samples - n_iface - n_bnd;
    int bad = 0, total = 0;
    double Ca = 0.0;
    for (int k = 0; k < n_bulk; ++k) {
        const double t = ts[k % ts.size()];
        const Vec2d p = R * std::sqrt(U(rng)) * unit_dir(2.0 * kPi * U(rng));
        if (!inside_domain(sc, p)) {
            --k;
            continue;
        }
        const double d = std::min(interface_distance(sc, p, t), boundary_signed_distance(sc, p));
        if (d < 1e-9) {
            --k;
            continue;
        }
        const double chi = chi_plus(sc, p, t);
        const double w = theta_weight(cal, p, t);
        const bool ok = chi > 0.5 ? w < 0.0 : w > 0.0;
        bad += !ok;
        ++total;
        Ca = std::max(Ca, std::min(d, 1.0) / std::abs(w));
        if (k < 2000) rep.rows.push_back({t, p(0), p(1), chi > 0.5 ? 1.0 : -1.0, w});
    }
    double zero = 0.0;
    for (int i = 0; i < int(sc.interfaces.size()); ++i)
        for (int k = 0; k < n_iface / int(sc.interfaces.size()); ++k) {
            const double t = ts[k % ts.size()];
            const auto smp = interface_samples(sc, i, t, 1, 0.0);
            const CurveFamily& cf = *sc.interfaces[i];
            const Vec2d p = cf.eval(cf.s_begin() + (cf.s_end() - cf.s_begin()) * U(rng), t).p;
            (void)smp;
            const double w = theta_weight(cal, p, t);
            zero = std::max(zero, std::abs(w));
            bad += std::abs(w) > 1e-12;
            ++total;
        }
    for (int k = 0; k < n_bnd; ++k) {
        const double t = ts[k % ts.size()];
        const CurveFamily& b = *sc.boundary;
        const Vec2d p = b.eval(b.s_begin() + (b.s_end() - b.s_begin()) * U(rng), 0.0).p;
        const double w = theta_weight(cal, p, t);
        zero = std::max(zero, std::abs(w));
        bad += std::abs(w) > 1e-12;
        ++total;
    }
    rep.add("sign-pattern", bad == 0, double(bad), 0.0, std::to_string(total) + " classified samples");
    rep.add("vanishes-on-interface-and-boundary", zero <= 1e-12, zero, 1e-12);
    rep.constants["lower_bound_C"] = Ca;
    rep.add("lower-bound-constant", std::isfinite(Ca) && Ca >= cal.scale() * (1.0 - 1e-9), Ca, cal.scale(),
            "min(dist, 1) <= C |theta|; identity branch predicts C >= delta r_hat");

    // (b) advective derivative against |ϑ| at two resolutions
    const double C1 = weight_transport_constant(cal, ts, 60, 180);
    const double C2 = weight_transport_constant(cal, ts, 120, 360);
    rep.constants["transport_C_coarse"] = C1;
    rep.constants["transport_C_fine"] = C2;
    const bool both_zero = C1 <= 1e-9 && C2 <= 1e-9;
    const double rel = both_zero ? 0.0 : std::abs(C2 - C1) / std::max(C1, C2);
    rep.add("transport-constant-stable", std::isfinite(C2) && (both_zero || rel <= 0.2), rel, 0.2,
            "C = " + SuiteReport::fmt(C1) + " / " + SuiteReport::fmt(C2));

    // compatibility of the two auxiliary weights on the interpolation wedges
    const auto D = log_distances();
    Envelope cw(D);
    double jump = 0.0;
    for (double t : ts)
        for (const auto& id : cal.radii().contacts) {
            const auto f = contact_frame<double>(sc, id.interface, id.end, t);
            for (int side : {0, 1})
                for (int j = 1; j < 8; ++j) {
                    const double a = (side == 0 ? 1.0 : -1.0) * (kPi / 6.0 + kPi / 6.0 * j / 8.0);
                    const Vec2d e = std::cos(a) * f.n_b + std::sin(a) * f.tau_b;
                    for (size_t k = 0; k < D.size(); ++k) {
                        const Vec2d p = f.c + D[k] * e;
                        const auto ctx = cal.context<double>(p, t);
                        const double wi = weight_interface(cal, ctx, id.interface);
                        const double wb = weight_boundary(cal, ctx, side);
                        cw.add(k, wi - wb);
                    }
                }
            for (double a0 : {kPi / 6.0, kPi / 3.0, 2.0 * kPi / 3.0})
                for (int sg : {-1, 1})
                    for (double r : {1e-3, 1e-2, 0.1}) {
                        auto at = [&](double a) {
                            return Vec2d(f.c + r * (std::cos(sg * a) * f.n_b + std::sin(sg * a) * f.tau_b));
                        };
                        const Vec2d p = at(a0 - 1e-11), q = at(a0 + 1e-11);
                        if (!inside_domain(sc, p) || !inside_domain(sc, q)) continue;
                        jump = std::max(jump, std::abs(theta_weight(cal, p, t) - theta_weight(cal, q, t)));
                    }
        }
    rep.add_fit("weight-compatibility-order", cw.fit(), 0.9);
    rep.add("wedge-continuity", jump <= 1e-8, jump, 1e-8);
    return rep;
}

} // namespace calib
