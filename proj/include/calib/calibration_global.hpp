#pragma once

// Partition of unity along the interface and the stitched global field
// ξ = Σ η_n ξ^n.

#include "calib/calibration_bulk.hpp"
#include "calib/calibration_contact.hpp"
#include "calib/radii.hpp"

#include <optional>
#include <vector>

namespace calib {

/// Per-feature cutoff values at one point.
template <class T> struct Cutoffs {
    std::vector<T> zeta_i, eta_i;         ///< per interface
    std::vector<T> zeta_c, eta_c, lambda; ///< per contact (λ = 1 outside interpolation wedges)
    std::vector<Wedge> wedge;             ///< per contact, OutsideBall beyond r̂
    T eta_bulk;
    T sum() const {
        T s(0.0);
        for (const auto& e : eta_i) s += e;
        for (const auto& e : eta_c) s += e;
        return s;
    }
};

/// Shared per-point evaluation context: frames, charts, wedge labels.
template <class T> struct PointContext {
    std::vector<ContactFrame<T>> frames;
    std::vector<std::optional<Chart<T>>> iface; ///< charts inside the band, if defined
    std::optional<Chart<T>> bnd;                ///< boundary chart (counter-clockwise τ)
    std::vector<Wedge> wedge;                   ///< per contact, OutsideBall beyond r̂
    int ball = -1;                              ///< contact whose r̂-ball contains p
};

class Calibration {
public:
    Calibration(Scene sc, Radii radii) : sc_(std::move(sc)), R_(std::move(radii)) {}

    const Scene& scene() const { return sc_; }
    const Radii& radii() const { return R_; }
    double r_hat() const { return R_.r_hat; }
    double delta() const { return R_.delta; }
    double scale() const { return R_.delta * R_.r_hat; }
    double band(int i) const { return 2.0 * R_.r_i.at(i); }

    template <class T> PointContext<T> context(const Vec2<T>& p, const T& t) const {
        PointContext<T> ctx;
        const Vec2d pv = value(p);
        for (const auto& id : R_.contacts) ctx.frames.push_back(contact_frame<T>(sc_, id.interface, id.end, t, false));
        for (int i = 0; i < int(sc_.interfaces.size()); ++i) {
            try {
                ctx.iface.push_back(interface_chart<T>(sc_, i, p, t, band(i)));
            } catch (const OutsideTubularBand&) {
                ctx.iface.push_back(std::nullopt);
            }
        }
        try {
            ctx.bnd = boundary_chart<T>(sc_, p, 1);
        } catch (const OutsideTubularBand&) {
        }
        for (size_t k = 0; k < ctx.frames.size(); ++k) {
            const double d = (pv - value(ctx.frames[k].c)).norm();
            if (d < R_.r_hat) {
                ctx.wedge.push_back(classify_direction(pv, ctx.frames[k]));
                ctx.ball = int(k);
            } else {
                ctx.wedge.push_back(Wedge::OutsideBall);
            }
        }
        return ctx;
    }

    template <class T> T zeta_interface(const PointContext<T>& ctx, int i) const {
        if (!ctx.iface[i]) return T(0.0);
        return profile::zeta(T(ctx.iface[i]->s / scale()));
    }

    template <class T> T lambda(const PointContext<T>& ctx, int k, const Vec2<T>& p) const {
        const Wedge w = ctx.wedge[k];
        if (!is_omega_wedge(w)) return T(w == Wedge::Interface ? 1.0 : 0.0);
        return interp_lambda(ctx.frames[k], p, wedge_side(w));
    }

    template <class T> Cutoffs<T> cutoffs(const PointContext<T>& ctx, const Vec2<T>& p) const {
        Cutoffs<T> cu;
        const int ni = int(sc_.interfaces.size()), nc = int(ctx.frames.size());
        for (int i = 0; i < ni; ++i) cu.zeta_i.push_back(zeta_interface(ctx, i));
        for (int k = 0; k < nc; ++k) {
            cu.zeta_c.push_back(profile::zeta(T(norm(Vec2<T>(p - ctx.frames[k].c)) / scale())));
            cu.lambda.push_back(ctx.wedge[k] == Wedge::OutsideBall ? T(1.0) : lambda(ctx, k, p));
            cu.wedge.push_back(ctx.wedge[k]);
        }
        for (int i = 0; i < ni; ++i) {
            T e = cu.zeta_i[i];
            if (ctx.ball >= 0) {
                const int k = ctx.ball;
                const Wedge w = ctx.wedge[k];
                if (R_.contacts[k].interface != i) e = T(0.0);
                else if (w == Wedge::Interface) e = (1.0 - cu.zeta_c[k]) * cu.zeta_i[i];
                else if (is_omega_wedge(w)) e = cu.lambda[k] * (1.0 - cu.zeta_c[k]) * cu.zeta_i[i];
                else e = T(0.0);
            }
            cu.eta_i.push_back(e);
        }
        for (int k = 0; k < nc; ++k) {
            T e(0.0);
            if (ctx.ball == k) {
                const Wedge w = ctx.wedge[k];
                const T& zi = cu.zeta_i[R_.contacts[k].interface];
                if (w == Wedge::Interface) e = cu.zeta_c[k] * zi;
                else if (is_omega_wedge(w)) e = cu.lambda[k] * cu.zeta_c[k] * zi + (1.0 - cu.lambda[k]) * cu.zeta_c[k];
                else e = cu.zeta_c[k];
            }
            cu.eta_c.push_back(e);
        }
        cu.eta_bulk = 1.0 - cu.sum();
        return cu;
    }

    template <class T> Cutoffs<T> cutoffs(const Vec2<T>& p, const T& t) const { return cutoffs(context(p, t), p); }

    /// Contact field ξ^c reusing the charts of the context.
    template <class T> Vec2<T> xi_contact_at(const PointContext<T>& ctx, int k, const Vec2<T>& p) const {
        const ContactFrame<T>& f = ctx.frames[k];
        const Wedge w = ctx.wedge[k];
        auto aux_i = [&]() -> Vec2<T> {
            const auto& ch = ctx.iface[f.interface];
            if (!ch) throw CalibrationDomainMiss("interface chart undefined inside the support of a contact cutoff");
            const Vec2<T> tau = ch->tau * double(f.interface_orient);
            const T as = f.alpha_T * ch->s;
            return ch->n + tau * as - ch->n * (0.5 * as * as);
        };
        auto aux_b = [&]() -> Vec2<T> {
            if (!ctx.bnd) throw CalibrationDomainMiss("boundary chart undefined inside the support of a contact cutoff");
            const Vec2<T> tau = ctx.bnd->tau * double(f.boundary_orient);
            const T as = f.alpha_B * ctx.bnd->s;
            return tau + ctx.bnd->n * as - tau * (0.5 * as * as);
        };
        Vec2<T> h;
        if (w == Wedge::Interface) h = aux_i();
        else if (is_boundary_wedge(w)) h = aux_b();
        else if (is_omega_wedge(w)) {
            const T lam = interp_lambda(f, p, wedge_side(w));
            h = aux_i() * lam + aux_b() * (1.0 - lam);
        } else {
            throw CalibrationDomainMiss("point outside the wedge decomposition of a contact point");
        }
        const T len = norm(h);
        if (value(len) < 0.5) throw NormalizationUnsafe("|xi_hat| = " + std::to_string(value(len)) + " < 1/2");
        return h / len;
    }

    template <class T> Vec2<T> xi(const Vec2<T>& p, const T& t) const {
        const PointContext<T> ctx = context(p, t);
        const Cutoffs<T> cu = cutoffs(ctx, p);
        Vec2<T> x(T(0.0), T(0.0));
        for (size_t i = 0; i < cu.eta_i.size(); ++i) {
            if (value(cu.eta_i[i]) == 0.0) continue;
            if (!ctx.iface[i]) throw CalibrationDomainMiss("interface chart undefined inside the support of eta_i");
            x += ctx.iface[i]->n * cu.eta_i[i];
        }
        for (size_t k = 0; k < cu.eta_c.size(); ++k) {
            if (value(cu.eta_c[k]) == 0.0) continue;
            x += xi_contact_at(ctx, int(k), p) * cu.eta_c[k];
        }
        return x;
    }

    Vec2d xi(const Vec2d& p, double t) const { return xi<double>(p, t); }

    VectorDerivs xi_derivs(const Vec2d& p, double t) const { return unpack(xi<Jet3>(seed_point(p), seed_time(t))); }

    ScalarDerivs eta_bulk_derivs(const Vec2d& p, double t) const {
        const Vec2<Jet3> pj = seed_point(p);
        return unpack(cutoffs<Jet3>(pj, seed_time(t)).eta_bulk);
    }

private:
    Scene sc_;
    Radii R_;
};

} // namespace calib
