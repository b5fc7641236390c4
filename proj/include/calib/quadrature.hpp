#pragma once

// Phase representations and the quadrature rules used by the functionals:
// composite Gauss-Legendre on curves, and a polar rule over the disk of radius
// r_max whose circles are split at their crossings with the phase curves.

#include "calib/geometry.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace calib {

/// Gauss-Legendre rule of order 8 on [-1, 1].
struct GaussRule {
    static constexpr int N = 8;
    std::array<double, N> x{}, w{};
    static const GaussRule& get() {
        static const GaussRule r = [] {
            using G = boost::math::quadrature::gauss<double, N>;
            GaussRule g;
            const auto& a = G::abscissa();
            const auto& wt = G::weights();
            for (int k = 0; k < N / 2; ++k) {
                g.x[N / 2 - 1 - k] = -a[k];
                g.w[N / 2 - 1 - k] = wt[k];
                g.x[N / 2 + k] = a[k];
                g.w[N / 2 + k] = wt[k];
            }
            return g;
        }();
        return r;
    }
};

/// Neumaier-compensated sum.
class Accumulator {
public:
    void add(double x) {
        const double t = s_ + x;
        c_ += std::abs(s_) >= std::abs(x) ? (s_ - t) + x : (x - t) + s_;
        s_ = t;
    }
    Accumulator& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

/// Parametrized interface curve of a phase: point and d/ds. Ω⁺ lies to the right.
struct PhaseCurve {
    std::function<std::pair<Vec2d, Vec2d>(double)> eval;
    double a = 0.0, b = 1.0;
    bool closed = false;
};

struct InterfaceNode {
    Vec2d x = Vec2d::Zero();
    Vec2d n = Vec2d::Zero(); ///< unit normal pointing into Ω⁺
    double w = 0.0;          ///< arc-length weight
    int curve = 0;
};

/// Ω⁺_u at one instant: its interface curves and the quadrature nodes on them.
class PhaseState {
public:
    PhaseState() = default;

    /// Composite Gauss nodes, `panels` panels per curve.
    PhaseState(std::vector<PhaseCurve> curves, int panels = 64) : curves_(std::move(curves)) {
        const auto& g = GaussRule::get();
        for (int c = 0; c < int(curves_.size()); ++c) {
            const auto& pc = curves_[c];
            const double h = (pc.b - pc.a) / panels;
            for (int p = 0; p < panels; ++p)
                for (int k = 0; k < GaussRule::N; ++k) {
                    const double s = pc.a + h * (p + 0.5 * (g.x[k] + 1.0));
                    auto [x, d] = pc.eval(s);
                    nodes_.push_back({x, rperp(Vec2d(d.normalized())), 0.5 * h * g.w[k] * d.norm(), c});
                }
        }
        sample();
    }

    /// Nodes supplied by the caller (e.g. markers of a transported curve).
    PhaseState(std::vector<PhaseCurve> curves, std::vector<InterfaceNode> nodes)
        : curves_(std::move(curves)), nodes_(std::move(nodes)) {
        sample();
    }

    const std::vector<PhaseCurve>& curves() const { return curves_; }
    const std::vector<InterfaceNode>& nodes() const { return nodes_; }

    double perimeter() const {
        Accumulator a;
        for (const auto& n : nodes_) a += n.w;
        return a.value();
    }

    /// Nearest point on the curves and the signed offset along the normal.
    std::pair<int, double> nearest(const Vec2d& p) const {
        int best = -1;
        double bd = 1e300, bs = 0.0;
        for (int c = 0; c < int(curves_.size()); ++c) {
            const auto& smp = samples_[c];
            int j0 = 0;
            for (int j = 1; j < int(smp.size()); ++j)
                if ((smp[j].second - p).squaredNorm() < (smp[j0].second - p).squaredNorm()) j0 = j;
            const auto& pc = curves_[c];
            const double lo = smp[std::max(j0 - 1, 0)].first, hi = smp[std::min(j0 + 1, int(smp.size()) - 1)].first;
            auto d2 = [&](double s) { return (pc.eval(s).first - p).squaredNorm(); };
            const auto r = boost::math::tools::brent_find_minima(d2, lo, hi, 50);
            if (r.second < bd) {
                bd = r.second;
                best = c;
                auto [x, d] = pc.eval(r.first);
                bs = (p - x).dot(rperp(Vec2d(d.normalized())));
            }
        }
        return {best, bs};
    }

    double chi(const Vec2d& p) const { return nearest(p).second > 0.0 ? 1.0 : 0.0; }

    /// Angles in [-π, π) where the curves cross the circle |x| = r.
    void circle_crossings(double r, std::vector<double>& out) const {
        const double r2 = r * r;
        for (int c = 0; c < int(curves_.size()); ++c) {
            const auto& smp = samples_[c];
            const auto& pc = curves_[c];
            auto f = [&](double s) { return pc.eval(s).first.squaredNorm() - r2; };
            for (int j = 0; j + 1 < int(smp.size()); ++j) {
                const double fa = smp[j].second.squaredNorm() - r2, fb = smp[j + 1].second.squaredNorm() - r2;
                if (fa == 0.0) {
                    out.push_back(angle(smp[j].second));
                    continue;
                }
                if ((fa < 0.0) == (fb < 0.0) || fb == 0.0) continue;
                std::uintmax_t it = 100;
                const auto br = boost::math::tools::toms748_solve(
                    f, smp[j].first, smp[j + 1].first, fa, fb,
                    [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, std::abs(x)); }, it);
                out.push_back(angle(pc.eval(0.5 * (br.first + br.second)).first));
            }
            if (!pc.closed && smp.back().second.squaredNorm() == r2) out.push_back(angle(smp.back().second));
        }
    }

    /// Radii where the crossing pattern changes: local extrema of |x| along the curves.
    std::vector<double> radial_breakpoints() const {
        std::vector<double> out;
        for (int c = 0; c < int(curves_.size()); ++c) {
            const auto& smp = samples_[c];
            const auto& pc = curves_[c];
            const int n = int(smp.size());
            auto q = [&](int j) { return smp[(j + n) % n].second.squaredNorm(); };
            for (int j = 0; j < n; ++j) {
                if (!pc.closed && (j == 0 || j == n - 1)) {
                    out.push_back(std::sqrt(q(j)));
                    continue;
                }
                const double a = q(j - 1), m = q(j), b = q(j + 1);
                const int sgn = (m <= a && m <= b) ? 1 : (m >= a && m >= b) ? -1 : 0;
                if (!sgn) continue;
                const double lo = smp[std::max(j - 1, 0)].first, hi = smp[std::min(j + 1, n - 1)].first;
                auto g = [&](double s) { return sgn * pc.eval(s).first.squaredNorm(); };
                const auto r = boost::math::tools::brent_find_minima(g, std::min(lo, hi), std::max(lo, hi), 50);
                out.push_back(std::sqrt(sgn * r.second));
            }
        }
        return out;
    }

private:
    static double angle(const Vec2d& p) { return std::atan2(p(1), p(0)); }

    void sample() {
        samples_.clear();
        for (const auto& pc : curves_) {
            const int n = 256;
            std::vector<std::pair<double, Vec2d>> smp;
            for (int j = 0; j <= n; ++j) {
                if (pc.closed && j == n) break;
                const double s = pc.a + (pc.b - pc.a) * j / n;
                smp.push_back({s, pc.eval(s).first});
            }
            samples_.push_back(std::move(smp));
        }
    }

    std::vector<PhaseCurve> curves_;
    std::vector<InterfaceNode> nodes_;
    std::vector<std::vector<std::pair<double, Vec2d>>> samples_;
};

inline PhaseCurve phase_curve(std::shared_ptr<const CurveFamily> c, double t) {
    PhaseCurve pc;
    pc.a = c->s_begin();
    pc.b = c->s_end();
    pc.closed = c->closed();
    pc.eval = [c, t](double s) {
        const CurvePoint cp = c->eval(s, t);
        return std::make_pair(cp.p, cp.d1);
    };
    return pc;
}

/// Phase bounded by the interfaces of a scene at time t.
inline PhaseState phase_from_scene(const Scene& sc, double t, int panels = 64) {
    std::vector<PhaseCurve> cs;
    for (const auto& c : sc.interfaces) cs.push_back(phase_curve(c, t));
    return PhaseState(std::move(cs), panels);
}

struct PolarOptions {
    double h_r = 0.02;   ///< radial panel width
    double h_arc = 0.02; ///< arc-length panel width on each circle
};

/// Quadrature over Ω in polar coordinates about the origin. Each circle is split
/// at its crossings with the phase curves (and the domain boundary when it is not
/// a centred disk); the arc callback sees each arc's midpoint once and may skip it.
class PolarQuadrature {
public:
    PolarQuadrature(const Scene& sc, std::vector<const PhaseState*> phases, PolarOptions opt = {})
        : sc_(&sc), phases_(std::move(phases)), opt_(opt) {
        if (sc.is_disk()) {
            r_max_ = sc.disk_radius;
        } else {
            boundary_ = PhaseState({phase_curve(sc.boundary, 0.0)}, 1);
            for (int k = 0; k < 512; ++k)
                r_max_ = std::max(r_max_, sc.boundary->eval(k / 512.0, 0.0).p.norm());
        }
        std::vector<double> br{0.0, r_max_};
        for (auto* ph : phases_)
            for (double r : ph->radial_breakpoints()) br.push_back(r);
        if (boundary_)
            for (double r : boundary_->radial_breakpoints()) br.push_back(r);
        for (double& r : br) r = std::clamp(r, 0.0, r_max_);
        std::sort(br.begin(), br.end());
        const auto& g = GaussRule::get();
        for (size_t k = 0; k + 1 < br.size(); ++k) {
            const double a = br[k], b = br[k + 1];
            if (b - a < 1e-13) continue;
            const int np = std::max(1, int(std::ceil((b - a) / opt_.h_r)));
            const double h = (b - a) / np;
            for (int p = 0; p < np; ++p)
                for (int j = 0; j < GaussRule::N; ++j) {
                    radii_.push_back(a + h * (p + 0.5 * (g.x[j] + 1.0)));
                    rw_.push_back(0.5 * h * g.w[j]);
                }
        }
    }

    double r_max() const { return r_max_; }

    /// ∫_Ω f. `arc(mid)` returns std::optional<Ctx>; `f(p, ctx)` is the integrand.
    template <class ArcFn, class F> double integrate(ArcFn&& arc, F&& f) const {
        const auto& g = GaussRule::get();
        Accumulator total;
        std::vector<double> ang;
        for (size_t k = 0; k < radii_.size(); ++k) {
            const double r = radii_[k];
            ang.clear();
            for (auto* ph : phases_) ph->circle_crossings(r, ang);
            if (boundary_) boundary_->circle_crossings(r, ang);
            std::sort(ang.begin(), ang.end());
            std::vector<std::pair<double, double>> arcs;
            if (ang.empty()) arcs.push_back({-kPi, kPi});
            for (size_t j = 0; j < ang.size(); ++j) {
                const double a = ang[j], b = j + 1 < ang.size() ? ang[j + 1] : ang[0] + 2.0 * kPi;
                if (b - a > 1e-15) arcs.push_back({a, b});
            }
            Accumulator circ;
            for (auto [a, b] : arcs) {
                const double m = 0.5 * (a + b);
                const Vec2d mid(r * std::cos(m), r * std::sin(m));
                if (boundary_ && !inside_domain(*sc_, mid)) continue;
                auto ctx = arc(mid);
                if (!ctx) continue;
                const int np = std::max(1, int(std::ceil((b - a) * r / opt_.h_arc)));
                const double h = (b - a) / np;
                for (int p = 0; p < np; ++p)
                    for (int j = 0; j < GaussRule::N; ++j) {
                        const double phi = a + h * (p + 0.5 * (g.x[j] + 1.0));
                        circ += 0.5 * h * g.w[j] * f(Vec2d(r * std::cos(phi), r * std::sin(phi)), *ctx);
                    }
            }
            total += rw_[k] * r * circ.value();
        }
        return total.value();
    }

private:
    const Scene* sc_;
    std::vector<const PhaseState*> phases_;
    std::optional<PhaseState> boundary_;
    PolarOptions opt_;
    double r_max_ = 0.0;
    std::vector<double> radii_, rw_;
};

} // namespace calib
