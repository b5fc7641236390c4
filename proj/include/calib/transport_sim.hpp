#pragma once

// Transport of interfaces by characteristics: markers at panel Gauss nodes and
// panel ends, advanced by an adaptive Dormand-Prince scheme.

#include "calib/functionals.hpp"

#include <boost/numeric/odeint.hpp>

namespace calib {

/// Curve through markers: panel ends plus the Gauss nodes of each panel,
/// interpolated per panel by the polynomial through those points.
class MarkerCurve {
public:
    static constexpr int M = GaussRule::N;

    MarkerCurve() = default;

    template <class F> static MarkerCurve sample(int panels, bool closed, F&& at) {
        MarkerCurve c;
        c.P_ = panels;
        c.closed_ = closed;
        const auto& g = GaussRule::get();
        c.ends_.resize(panels + 1);
        c.inner_.resize(std::size_t(panels) * M);
        for (int p = 0; p <= panels; ++p) c.ends_[p] = at(double(p) / panels);
        if (closed) c.ends_[panels] = c.ends_[0];
        for (int p = 0; p < panels; ++p)
            for (int j = 0; j < M; ++j) c.inner_[p * M + j] = at((p + 0.5 * (g.x[j] + 1.0)) / panels);
        return c;
    }

    /// Markers on a transported family at time t, `markers` in total (rounded to whole panels).
    static MarkerCurve from_family(const CurveFamily& cf, double t, int markers = 512) {
        const int panels = std::max(1, int(std::lround(double(markers) / (M + 1))));
        const double a = cf.s_begin(), L = cf.s_end() - cf.s_begin();
        return sample(panels, cf.closed(), [&](double u) { return cf.eval(a + L * u, t).p; });
    }

    static MarkerCurve from_initial(const InitialCurve& g, int markers = 512) {
        const int panels = std::max(1, int(std::lround(double(markers) / (M + 1))));
        const double a = g.s_begin(), L = g.s_end() - g.s_begin();
        return sample(panels, g.closed(), [&](double u) { return g.eval(a + L * u)[0]; });
    }

    int panels() const { return P_; }
    bool closed() const { return closed_; }
    std::size_t size() const { return ends_.size() + inner_.size(); }

    /// All markers as a flat coordinate vector (ends first, then inner nodes).
    std::vector<double> state() const {
        std::vector<double> s;
        s.reserve(2 * size());
        for (const auto* v : {&ends_, &inner_})
            for (const auto& p : *v) {
                s.push_back(p(0));
                s.push_back(p(1));
            }
        return s;
    }
    void set_state(const std::vector<double>& s) {
        std::size_t k = 0;
        for (auto* v : {&ends_, &inner_})
            for (auto& p : *v) {
                p = Vec2d(s[k], s[k + 1]);
                k += 2;
            }
        if (closed_) ends_[P_] = ends_[0];
    }

    const std::vector<Vec2d>& ends() const { return ends_; }
    const std::vector<Vec2d>& inner() const { return inner_; }
    Vec2d front() const { return ends_.front(); }
    Vec2d back() const { return ends_.back(); }

    /// Point and derivative with respect to u ∈ [0, panels].
    std::pair<Vec2d, Vec2d> eval(double u) const {
        const int p = std::clamp(int(std::floor(u)), 0, P_ - 1);
        const double x = 2.0 * (u - p) - 1.0;
        const auto& X = nodes();
        std::array<Vec2d, M + 2> Y;
        Y[0] = ends_[p];
        for (int j = 0; j < M; ++j) Y[j + 1] = inner_[p * M + j];
        Y[M + 1] = ends_[p + 1];
        Vec2d val = Vec2d::Zero(), der = Vec2d::Zero();
        for (int j = 0; j < M + 2; ++j) {
            double L = 1.0, dL = 0.0;
            for (int k = 0; k < M + 2; ++k) {
                if (k == j) continue;
                const double den = X[j] - X[k];
                dL = dL * (x - X[k]) / den + L / den;
                L *= (x - X[k]) / den;
            }
            val += L * Y[j];
            der += dL * Y[j];
        }
        return {val, 2.0 * der};
    }

    /// Arc-length weight of each inner marker.
    std::vector<InterfaceNode> interface_nodes(int curve = 0) const {
        const auto& g = GaussRule::get();
        std::vector<InterfaceNode> out;
        for (int p = 0; p < P_; ++p)
            for (int j = 0; j < M; ++j) {
                const Vec2d d = eval(p + 0.5 * (g.x[j] + 1.0)).second;
                out.push_back({inner_[p * M + j], rperp(Vec2d(d.normalized())), 0.5 * g.w[j] * d.norm(), curve});
            }
        return out;
    }

    std::vector<double> panel_lengths() const {
        const auto& g = GaussRule::get();
        std::vector<double> L(P_, 0.0);
        for (int p = 0; p < P_; ++p)
            for (int j = 0; j < M; ++j) L[p] += 0.5 * g.w[j] * eval(p + 0.5 * (g.x[j] + 1.0)).second.norm();
        return L;
    }

    double length() const {
        Accumulator a;
        for (double l : panel_lengths()) a += l;
        return a.value();
    }

    /// ½∫ x × dx along the curve.
    double signed_area_flux() const {
        const auto& g = GaussRule::get();
        Accumulator a;
        for (int p = 0; p < P_; ++p)
            for (int j = 0; j < M; ++j) {
                auto [x, d] = eval(p + 0.5 * (g.x[j] + 1.0));
                a += 0.5 * g.w[j] * 0.5 * cross(x, d);
            }
        return a.value();
    }

    PhaseCurve phase_curve() const {
        PhaseCurve pc;
        pc.a = 0.0;
        pc.b = P_;
        pc.closed = closed_;
        auto self = std::make_shared<MarkerCurve>(*this);
        pc.eval = [self](double u) { return self->eval(u); };
        return pc;
    }

    /// Same curve re-sampled with panels of equal arc length.
    MarkerCurve redistributed() const {
        const auto L = panel_lengths();
        std::vector<double> cum(P_ + 1, 0.0);
        for (int p = 0; p < P_; ++p) cum[p + 1] = cum[p] + L[p];
        const double total = cum.back();
        const auto& g = GaussRule::get();
        auto partial = [&](double u) {
            const int p = std::clamp(int(std::floor(u)), 0, P_ - 1);
            const double f = u - p;
            double s = cum[p];
            for (int j = 0; j < M; ++j) s += 0.5 * f * g.w[j] * eval(p + f * 0.5 * (g.x[j] + 1.0)).second.norm();
            return s;
        };
        auto u_of = [&](double s) {
            if (s <= 0.0) return 0.0;
            if (s >= total) return double(P_);
            const int p = int(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
            std::uintmax_t it = 100;
            const auto r = boost::math::tools::toms748_solve([&](double u) { return partial(u) - s; }, double(p),
                                                             double(p + 1),
                                                             [](double a, double b) { return std::abs(a - b) < 1e-15; }, it);
            return 0.5 * (r.first + r.second);
        };
        return sample(P_, closed_, [&](double w) { return eval(u_of(w * total)).first; });
    }

private:
    static const std::array<double, M + 2>& nodes() {
        static const std::array<double, M + 2> X = [] {
            std::array<double, M + 2> x{};
            const auto& g = GaussRule::get();
            x[0] = -1.0;
            for (int j = 0; j < M; ++j) x[j + 1] = g.x[j];
            x[M + 1] = 1.0;
            return x;
        }();
        return X;
    }

    int P_ = 0;
    bool closed_ = false;
    std::vector<Vec2d> ends_, inner_;
};

/// Phase whose interfaces are the given marker curves; nodes are the inner markers.
inline PhaseState phase_from_markers(const std::vector<MarkerCurve>& cs) {
    std::vector<PhaseCurve> pcs;
    std::vector<InterfaceNode> nodes;
    for (int c = 0; c < int(cs.size()); ++c) {
        pcs.push_back(cs[c].phase_curve());
        for (const auto& n : cs[c].interface_nodes(c)) nodes.push_back(n);
    }
    return PhaseState(std::move(pcs), std::move(nodes));
}

// ---------------------------------------------------------------- trajectory

struct EvolveOptions {
    int markers = 512;
    double tol = 1e-11;       ///< absolute and relative step tolerance
    double fail_tol = 1e-9;   ///< StepFailure if this cannot be met
    double spacing_factor = 2.0;
};

struct ContactDiagnostics {
    double max_boundary_distance = 0.0; ///< of the contact markers
    double max_angle_deviation_deg = 0.0;
    double min_separation = 0.0;        ///< between distinct contact points
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<MarkerCurve>> curves; ///< [time][interface]
    std::vector<double> perimeter;
    std::vector<double> area;                     ///< Ω⁺ side of the interfaces
    std::vector<ContactDiagnostics> contacts;
    int redistributions = 0;

    PhaseState phase(std::size_t k) const { return phase_from_markers(curves.at(k)); }
};

/// ½∫ x × dx clockwise along ∂Ω from `from` to `to`.
inline double boundary_arc_flux(const Scene& sc, const Vec2d& from, const Vec2d& to) {
    const CurveFamily& b = *sc.boundary;
    const double s0 = project(b, to, 0.0).s, s1 = project(b, from, 0.0).s;
    const double L = b.s_end() - b.s_begin();
    double span = std::fmod(s1 - s0, L);
    if (span < 0.0) span += L;
    const auto& g = GaussRule::get();
    const int P = 64;
    Accumulator a;
    for (int p = 0; p < P; ++p)
        for (int j = 0; j < GaussRule::N; ++j) {
            const double s = s0 + span * (p + 0.5 * (g.x[j] + 1.0)) / P;
            const CurvePoint cp = b.eval(s, 0.0);
            a += 0.5 * g.w[j] * span / P * 0.5 * cross(cp.p, cp.d1);
        }
    return -a.value();
}

/// Area on the Ω⁺ side of the interfaces (right of each curve).
inline double phase_area(const Scene& sc, const std::vector<MarkerCurve>& cs) {
    Accumulator a;
    for (const auto& c : cs) {
        a += c.signed_area_flux();
        if (!c.closed()) a += boundary_arc_flux(sc, c.back(), c.front());
    }
    return -a.value();
}

inline ContactDiagnostics contact_diagnostics(const Scene& sc, const std::vector<MarkerCurve>& cs) {
    ContactDiagnostics d;
    std::vector<Vec2d> pts;
    for (const auto& c : cs) {
        if (c.closed()) continue;
        for (int e = 0; e < 2; ++e) {
            const Vec2d x = e ? c.back() : c.front();
            const Vec2d tau = (e ? c.eval(c.panels()) : c.eval(0.0)).second.normalized();
            const Projection pr = project(*sc.boundary, x, 0.0);
            const Vec2d nb = perp(Vec2d(pr.cp.d1.normalized()));
            d.max_boundary_distance = std::max(d.max_boundary_distance, pr.distance);
            const double dev = std::acos(std::min(1.0, std::abs(tau.dot(nb)))) * 180.0 / kPi;
            d.max_angle_deviation_deg = std::max(d.max_angle_deviation_deg, dev);
            pts.push_back(x);
        }
    }
    d.min_separation = pts.size() > 1 ? 1e300 : 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) d.min_separation = std::min(d.min_separation, (pts[i] - pts[j]).norm());
    return d;
}

/// Advance markers of the initial curves through the time grid.
inline Trajectory evolve(const Scene& sc, const std::vector<MarkerCurve>& initial, const std::vector<double>& times,
                         const EvolveOptions& opt = {}) {
    namespace ode = boost::numeric::odeint;
    using State = std::vector<double>;
    if (times.empty()) throw SceneError("empty time grid");
    Trajectory tr;
    std::vector<MarkerCurve> cur = initial;
    std::vector<double> ratio0;
    auto spacing_ratio = [](const MarkerCurve& c) {
        const auto L = c.panel_lengths();
        return *std::max_element(L.begin(), L.end()) / std::max(*std::min_element(L.begin(), L.end()), 1e-300);
    };
    for (const auto& c : cur) ratio0.push_back(spacing_ratio(c));
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.curves.push_back(cur);
        Accumulator L;
        for (const auto& c : cur) L += c.length();
        tr.perimeter.push_back(L.value());
        tr.area.push_back(phase_area(sc, cur));
        tr.contacts.push_back(contact_diagnostics(sc, cur));
    };
    record(times[0]);
    const VelocityField& v = sc.velocity;
    auto rhs = [&](const State& x, State& dx, double t) {
        dx.resize(x.size());
        for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
            const Vec2d u = v(Vec2d(x[k], x[k + 1]), t);
            dx[k] = u(0);
            dx[k + 1] = u(1);
        }
    };
    for (std::size_t n = 1; n < times.size(); ++n) {
        const double t0 = times[n - 1], t1 = times[n];
        for (std::size_t c = 0; c < cur.size(); ++c) {
            State x = cur[c].state();
            try {
                auto stepper = ode::make_controlled(opt.tol, opt.tol, ode::runge_kutta_dopri5<State>());
                ode::integrate_adaptive(stepper, rhs, x, t0, t1, (t1 - t0) / 4.0);
            } catch (const std::exception& e) {
                throw StepFailure(std::string("adaptive integrator failed: ") + e.what());
            }
            for (double q : x)
                if (!std::isfinite(q)) throw StepFailure("non-finite marker position");
            cur[c].set_state(x);
            if (spacing_ratio(cur[c]) > opt.spacing_factor * ratio0[c]) {
                cur[c] = cur[c].redistributed();
                ratio0[c] = spacing_ratio(cur[c]);
                ++tr.redistributions;
            }
        }
        record(t1);
    }
    return tr;
}

inline Trajectory evolve(const Scene& sc, const std::vector<double>& times, const EvolveOptions& opt = {}) {
    std::vector<MarkerCurve> init;
    for (const auto& g : sc.interface_shapes) init.push_back(MarkerCurve::from_initial(*g, opt.markers));
    return evolve(sc, init, times, opt);
}

inline std::vector<double> uniform_grid(double T, double dt) {
    const int n = std::max(1, int(std::lround(T / dt)));
    std::vector<double> ts(n + 1);
    for (int k = 0; k <= n; ++k) ts[k] = T * k / n;
    return ts;
}

/// ∫_I (Id - n⊗n) : ∇v dH¹ over the interfaces of a marker phase.
inline double perimeter_rate(const VelocityField& v, const std::vector<MarkerCurve>& cs, double t) {
    Accumulator a;
    for (const auto& c : cs)
        for (const auto& n : c.interface_nodes()) {
            const Mat2d G = v.derivs(n.x, t).jac;
            a += n.w * (G.trace() - n.n.dot(G * n.n));
        }
    return a.value();
}

struct PerimeterRateCheck {
    double residual = 0.0;  ///< relative, or absolute when both sides vanish
    double max_rate = 0.0;
    double max_diff = 0.0;
};

/// Centred differences of the perimeter against the tangential divergence of v.
inline PerimeterRateCheck perimeter_rate_check(const Scene& sc, const Trajectory& tr) {
    if (tr.times.size() < 3) throw SceneError("perimeter rate check needs at least three time samples");
    PerimeterRateCheck r;
    for (std::size_t k = 1; k + 1 < tr.times.size(); ++k) {
        const double fd = (tr.perimeter[k + 1] - tr.perimeter[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
        const double ex = perimeter_rate(sc.velocity, tr.curves[k], tr.times[k]);
        r.max_rate = std::max({r.max_rate, std::abs(ex), std::abs(fd)});
        r.max_diff = std::max(r.max_diff, std::abs(fd - ex));
    }
    r.residual = r.max_rate > 1e-12 ? r.max_diff / r.max_rate : r.max_diff;
    return r;
}

/// sup |∇v| (operator norm) over a polar grid and the given times.
inline double velocity_gradient_bound(const Scene& sc, const std::vector<double>& ts) {
    const double R = sc.is_disk() ? sc.disk_radius : 0.5 * sc.diameter();
    double m = 0.0;
    for (double t : ts)
        for (int i = 0; i <= 30; ++i)
            for (int j = 0; j < 90; ++j) {
                const double r = R * i / 30.0, a = 2.0 * kPi * j / 90.0;
                const Vec2d p(r * std::cos(a), r * std::sin(a));
                if (!sc.is_disk() && !inside_domain(sc, p)) continue;
                Eigen::JacobiSVD<Mat2d> svd(sc.velocity.derivs(p, t).jac);
                m = std::max(m, svd.singularValues()(0));
            }
    return m;
}

/// Worst ratio separation(t) / (separation(0) e^{-2‖∇v‖ t}); ≥ 1 when the bound holds.
inline double separation_bound_ratio(const Scene& sc, const Trajectory& tr) {
    const double G = velocity_gradient_bound(sc, tr.times);
    const double d0 = tr.contacts.front().min_separation;
    double worst = 1e300;
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        worst = std::min(worst, tr.contacts[k].min_separation / (d0 * std::exp(-2.0 * G * tr.times[k])));
    return worst;
}

// ---------------------------------------------------------------- fixtures

struct PairFixture {
    Scene strong;
    Scene weak_scene;
    WeakSolution weak;
};

/// Strong fixture: DISK-DIAMETER under the preset flow. Weak candidate: the
/// diameter rotated by ε and transported by the same velocity, exact lift, u = v.
inline PairFixture make_pair(const std::string& preset, double eps, double horizon = 1.0, double omega = 1.0,
                             double shear = 2.0, int panels = 64) {
    VelocityField v;
    if (preset == "rotation") v = VelocityField::rotation(omega);
    else if (preset == "radial_shear") v = VelocityField::radial_shear(omega, shear);
    else if (preset == "zero") v = VelocityField::zero();
    else throw SceneError("unknown pair preset '" + preset + "'");
    PairFixture f;
    f.strong = disk_diameter(v, horizon);
    f.weak_scene = rotated_copy(f.strong, eps);
    f.weak = weak_from_scene(f.weak_scene, panels);
    return f;
}

/// max |∇v + ∇vᵀ| over a polar grid (vanishes for rigid rotation).
inline double max_strain(const Scene& sc, double t) {
    const double R = sc.is_disk() ? sc.disk_radius : 0.5 * sc.diameter();
    double m = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j < 60; ++j) {
            const Vec2d p = R * i / 20.0 * unit_dir(2.0 * kPi * j / 60.0);
            const Mat2d G = sc.velocity.derivs(p, t).jac;
            m = std::max(m, (G + G.transpose()).norm());
        }
    return m;
}

} // namespace calib
