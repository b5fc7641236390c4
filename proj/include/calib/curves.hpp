#pragma once

// Parametrized planar curves with analytic derivatives, nearest-point projection
// and signed-distance charts.

#include "calib/core.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <memory>
#include <optional>

namespace calib {

/// Position and derivatives of a curve family at (σ, t).
/// d1..d3 are σ-derivatives, pt..d2t their time derivatives.
struct CurvePoint {
    Vec2d p = Vec2d::Zero(), d1 = Vec2d::Zero(), d2 = Vec2d::Zero(), d3 = Vec2d::Zero();
    Vec2d pt = Vec2d::Zero(), d1t = Vec2d::Zero(), d2t = Vec2d::Zero();
};

/// Time-dependent curve γ(σ, t). Open curves use σ ∈ [s_begin, s_end] and may be
/// evaluated on an extension of that range; closed curves are periodic.
class CurveFamily {
public:
    virtual ~CurveFamily() = default;
    virtual CurvePoint eval(double s, double t) const = 0;
    virtual double s_begin() const = 0;
    virtual double s_end() const = 0;
    virtual bool closed() const = 0;
    /// Parameter margin beyond each end available to the projection.
    virtual double extension() const { return 0.25 * (s_end() - s_begin()); }
    /// Optional seed for the nearest-point search.
    virtual std::optional<double> guess(const Vec2d&, double) const { return std::nullopt; }
};

// ---------------------------------------------------------------- initial shapes

/// Time-independent parametrized curve with derivatives up to order 3.
class InitialCurve {
public:
    virtual ~InitialCurve() = default;
    virtual std::array<Vec2d, 4> eval(double s) const = 0;
    virtual double s_begin() const = 0;
    virtual double s_end() const = 0;
    virtual bool closed() const = 0;
    virtual std::optional<double> guess(const Vec2d&) const { return std::nullopt; }
};

inline Vec2d unit_dir(double a) { return {std::cos(a), std::sin(a)}; }

/// Straight segment a + s·b, s ∈ [-1, 1].
class SegmentCurve final : public InitialCurve {
public:
    SegmentCurve(Vec2d a, Vec2d b) : a_(std::move(a)), b_(std::move(b)) {}
    std::array<Vec2d, 4> eval(double s) const override {
        return {a_ + s * b_, b_, Vec2d::Zero(), Vec2d::Zero()};
    }
    double s_begin() const override { return -1.0; }
    double s_end() const override { return 1.0; }
    bool closed() const override { return false; }
    std::optional<double> guess(const Vec2d& p) const override { return (p - a_).dot(b_) / b_.squaredNorm(); }

private:
    Vec2d a_, b_;
};

/// Circular arc center + ρ·e(ψ0 + k·s), s ∈ [-1, 1] (open) or full circle
/// center + ρ·e(ψ0 + 2π k s), s ∈ [0, 1) (closed). k < 0 traverses clockwise.
class ArcCurve final : public InitialCurve {
public:
    ArcCurve(Vec2d center, double radius, double psi0, double k, bool closed)
        : c_(std::move(center)), rho_(radius), psi0_(psi0), k_(closed ? 2.0 * kPi * k : k), closed_(closed) {}
    std::array<Vec2d, 4> eval(double s) const override {
        const double a = psi0_ + k_ * s;
        const Vec2d e = unit_dir(a), ep = perp(e);
        return {c_ + rho_ * e, rho_ * k_ * ep, -rho_ * k_ * k_ * e, -rho_ * k_ * k_ * k_ * ep};
    }
    double s_begin() const override { return closed_ ? 0.0 : -1.0; }
    double s_end() const override { return 1.0; }
    bool closed() const override { return closed_; }
    std::optional<double> guess(const Vec2d& p) const override {
        const Vec2d d = p - c_;
        if (d.norm() < 1e-14) return std::nullopt;
        double a = std::atan2(d(1), d(0)) - psi0_;
        const double period = 2.0 * kPi;
        a = std::remainder(a, period);
        double s = a / k_;
        if (closed_) {
            s -= std::floor(s);
        }
        return s;
    }

private:
    Vec2d c_;
    double rho_, psi0_, k_;
    bool closed_;
};

/// Ellipse (a cos 2πs, b sin 2πs), counter-clockwise, s ∈ [0, 1).
class EllipseCurve final : public InitialCurve {
public:
    EllipseCurve(double a, double b) : a_(a), b_(b) {}
    std::array<Vec2d, 4> eval(double s) const override {
        const double w = 2.0 * kPi, c = std::cos(w * s), sn = std::sin(w * s);
        return {Vec2d(a_ * c, b_ * sn), w * Vec2d(-a_ * sn, b_ * c), w * w * Vec2d(-a_ * c, -b_ * sn),
                w * w * w * Vec2d(a_ * sn, -b_ * c)};
    }
    double s_begin() const override { return 0.0; }
    double s_end() const override { return 1.0; }
    bool closed() const override { return true; }
    std::optional<double> guess(const Vec2d& p) const override {
        double s = std::atan2(p(1) / b_, p(0) / a_) / (2.0 * kPi);
        return s - std::floor(s);
    }

private:
    double a_, b_;
};

// ---------------------------------------------------------------- azimuthal transport

/// Angular velocity profile ω(r) = W(r^2) of an azimuthal flow v = ω(r)(-x2, x1)
/// in a disk of radius R: W(q) = w0 + a (q/R^2 - q^2/(2 R^4)). With a ≠ 0 the
/// profile is sheared but ω'(R) = 0.
struct AzimuthalProfile {
    double w0 = 0.0;
    double a = 0.0;
    double R = 1.0;

    double W(double q) const { return w0 + a * (q / (R * R) - q * q / (2.0 * R * R * R * R)); }
    double W1(double q) const { return a * (1.0 / (R * R) - q / (R * R * R * R)); }
    double W2(double) const { return -a / (R * R * R * R); }
    bool is_zero() const { return w0 == 0.0 && a == 0.0; }
};

/// Image of an initial curve under the exact flow map of an azimuthal field:
/// γ(σ, t) = exp(i t W(|γ0|^2)) γ0(σ).
class TransportedCurve final : public CurveFamily {
public:
    TransportedCurve(std::shared_ptr<const InitialCurve> g0, AzimuthalProfile w)
        : g0_(std::move(g0)), w_(w) {}

    CurvePoint eval(double s, double t) const override {
        using C = std::complex<double>;
        const auto g = g0_->eval(s);
        auto cx = [](const Vec2d& v) { return C(v(0), v(1)); };
        auto vx = [](const C& z) { return Vec2d(z.real(), z.imag()); };
        const C g0 = cx(g[0]), g1 = cx(g[1]), g2 = cx(g[2]), g3 = cx(g[3]);
        const double q = g[0].squaredNorm();
        const double q1 = 2.0 * g[0].dot(g[1]);
        const double q2 = 2.0 * (g[1].dot(g[1]) + g[0].dot(g[2]));
        const double q3 = 2.0 * (3.0 * g[1].dot(g[2]) + g[0].dot(g[3]));
        const double W = w_.W(q), W1 = w_.W1(q), W2 = w_.W2(q);
        // ψ = t W(q) and its σ-derivatives (W is quadratic so W''' = 0)
        const double w1 = W1 * q1, w2 = W2 * q1 * q1 + W1 * q2, w3 = 3.0 * W2 * q1 * q2 + W1 * q3;
        const double p1 = t * w1, p2 = t * w2, p3 = t * w3;
        const C I(0.0, 1.0);
        const C E = std::exp(I * (t * W));
        const C e1 = I * p1, e2 = I * p2 + (I * p1) * (I * p1),
                e3 = I * p3 + 3.0 * (I * p1) * (I * p2) + (I * p1) * (I * p1) * (I * p1);
        CurvePoint cp;
        const C r0 = g0, r1 = e1 * g0 + g1, r2 = e2 * g0 + 2.0 * e1 * g1 + g2,
                r3 = e3 * g0 + 3.0 * e2 * g1 + 3.0 * e1 * g2 + g3;
        cp.p = vx(E * r0);
        cp.d1 = vx(E * r1);
        cp.d2 = vx(E * r2);
        cp.d3 = vx(E * r3);
        // time derivatives: ∂_t E = i W E, ∂_t e_k follow from ψ_k = t w_k
        const C et1 = I * w1, et2 = I * w2 + 2.0 * (I * p1) * (I * w1);
        cp.pt = vx(I * W * E * r0);
        cp.d1t = vx(E * (I * W * r1 + et1 * g0));
        cp.d2t = vx(E * (I * W * r2 + et2 * g0 + 2.0 * et1 * g1));
        return cp;
    }
    double s_begin() const override { return g0_->s_begin(); }
    double s_end() const override { return g0_->s_end(); }
    bool closed() const override { return g0_->closed(); }
    std::optional<double> guess(const Vec2d& p, double t) const override {
        if (w_.is_zero()) return g0_->guess(p);
        const double ang = -t * w_.W(p.squaredNorm());
        const Vec2d back(std::cos(ang) * p(0) - std::sin(ang) * p(1), std::sin(ang) * p(0) + std::cos(ang) * p(1));
        return g0_->guess(back);
    }
    const InitialCurve& initial() const { return *g0_; }
    const AzimuthalProfile& profile() const { return w_; }

private:
    std::shared_ptr<const InitialCurve> g0_;
    AzimuthalProfile w_;
};

inline std::shared_ptr<const CurveFamily> make_static(std::shared_ptr<const InitialCurve> g) {
    return std::make_shared<TransportedCurve>(std::move(g), AzimuthalProfile{});
}

// ---------------------------------------------------------------- projection

struct Projection {
    double s = 0.0;
    CurvePoint cp;
    double distance = 0.0;
    bool beyond_end = false; ///< nearest point sits at the edge of the extended range
};

inline double wrap_param(const CurveFamily& c, double s) {
    const double a = c.s_begin(), L = c.s_end() - c.s_begin();
    return a + (s - a) - L * std::floor((s - a) / L);
}

/// Global nearest point of γ(·, t) to p: seeded by the curve's own guess or a
/// coarse scan, refined by safeguarded Newton iteration.
inline Projection project(const CurveFamily& c, const Vec2d& p, double t, int scan = 64) {
    const bool closed = c.closed();
    const double ext = closed ? 0.0 : c.extension();
    const double lo = c.s_begin() - ext, hi = c.s_end() + ext;
    auto dist2 = [&](double s) { return (c.eval(s, t).p - p).squaredNorm(); };

    double s0;
    if (auto g = c.guess(p, t); g && *g >= lo && *g <= hi) {
        s0 = *g;
    } else {
        s0 = lo;
        double best = dist2(lo);
        const int n = closed ? scan : scan + 1;
        for (int k = 1; k < n; ++k) {
            const double s = lo + (hi - lo) * k / scan;
            const double d = dist2(s);
            if (d < best) { best = d; s0 = s; }
        }
    }
    double s = s0;
    const double span = hi - lo;
    for (int it = 0; it < 60; ++it) {
        const CurvePoint cp = c.eval(s, t);
        const Vec2d r = cp.p - p;
        const double f = r.dot(cp.d1);
        double fp = cp.d1.squaredNorm() + r.dot(cp.d2);
        if (fp <= 1e-3 * cp.d1.squaredNorm()) fp = cp.d1.squaredNorm();
        double step = f / fp;
        const double cap = 0.1 * span;
        step = std::clamp(step, -cap, cap);
        double sn = s - step;
        if (closed) sn = wrap_param(c, sn);
        else sn = std::clamp(sn, lo, hi);
        const bool done = std::abs(step) < 1e-15 * span;
        s = sn;
        if (done) break;
    }
    Projection pr;
    pr.s = s;
    pr.cp = c.eval(s, t);
    pr.distance = (pr.cp.p - p).norm();
    pr.beyond_end = !closed && (s <= lo + 1e-12 * span || s >= hi - 1e-12 * span);
    return pr;
}

// ---------------------------------------------------------------- charts

/// Signed-distance chart evaluation.
template <class T> struct Chart {
    T s;
    Vec2<T> P, n, tau;
    T H;
    double sigma = 0.0; ///< curve parameter of the nearest point
};

/// Curve derivative bundle lifted to a jet: positions perturbed to first order in
/// (dσ, dt).
template <class T> struct LiftedCurve {
    Vec2<T> p, d1, d2;
};

template <class T> LiftedCurve<T> lift_curve(const CurvePoint& cp, const T& ds, const T& dt) {
    LiftedCurve<T> l;
    for (int i = 0; i < 2; ++i) {
        l.p(i) = cp.p(i) + cp.d1(i) * ds + cp.pt(i) * dt;
        l.d1(i) = cp.d1(i) + cp.d2(i) * ds + cp.d1t(i) * dt;
        l.d2(i) = cp.d2(i) + cp.d3(i) * ds + cp.d2t(i) * dt;
    }
    return l;
}

/// Frame of a lifted curve point: unit tangent in curve direction, normal
/// side·rperp(τ), and H = -div n = -side·κ.
template <class T> void curve_frame(const LiftedCurve<T>& l, int side, Vec2<T>& tau, Vec2<T>& n, T& H) {
    const T len = norm(l.d1);
    tau = l.d1 / len;
    n = rperp(tau) * double(side);
    const T kappa = cross(l.d1, l.d2) / (len * len * len);
    H = -double(side) * kappa;
}

/// Chart of a curve at (p, t); derivatives of the nearest-point parameter follow
/// from one Newton step in jet arithmetic (implicit function theorem).
template <class T> Chart<T> curve_chart(const CurveFamily& c, const Vec2<T>& p, const T& t, int side,
                                        const Projection& pr) {
    const double t0 = value(t);
    const CurvePoint& cp = pr.cp;
    const T dt = t - T(t0);
    const T zero(0.0);
    // f(σ) = (γ - p)·γ' with σ frozen, lifted in t only
    const LiftedCurve<T> l0 = lift_curve(cp, zero, dt);
    const Vec2<T> r = l0.p - p;
    const T f = r.dot(l0.d1);
    const double fp = cp.d1.squaredNorm() + (cp.p - value(p)).dot(cp.d2);
    const T ds = -f / fp;
    const LiftedCurve<T> l = lift_curve(cp, ds, dt);
    Chart<T> ch;
    curve_frame(l, side, ch.tau, ch.n, ch.H);
    ch.P = l.p;
    ch.s = (p - l.p).dot(ch.n);
    ch.sigma = pr.s;
    return ch;
}

template <class T> Chart<T> curve_chart(const CurveFamily& c, const Vec2<T>& p, const T& t, int side) {
    return curve_chart(c, p, t, side, project(c, value(p), value(t)));
}

} // namespace calib
