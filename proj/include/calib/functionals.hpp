#pragma once

// Varifold slices, the interface and bulk error functionals, the relative
// entropy and the terms of its time evolution.

#include "calib/calibration.hpp"
#include "calib/quadrature.hpp"

#include <future>
#include <mutex>
#include <thread>

namespace calib {

// ---------------------------------------------------------------- varifolds

enum class AtomKind { Node, Boundary, Interior };

struct VarifoldAtom {
    Vec2d x = Vec2d::Zero();
    Vec2d s = Vec2d::Zero(); ///< unit orientation
    double w = 0.0;
    AtomKind kind = AtomKind::Node;
    int node = -1; ///< interface node the atom sits on (kind Node)
};

/// Finite-atom oriented varifold on Ω̄ × S¹ together with the density θ of
/// |∇χ_u| with respect to |V| at each interface node.
struct DiscreteVarifoldSlice {
    std::vector<VarifoldAtom> atoms;
    std::vector<double> theta;

    double mass() const {
        Accumulator a;
        for (const auto& at : atoms) a += at.w;
        return a.value();
    }
    double boundary_mass() const {
        Accumulator a;
        for (const auto& at : atoms)
            if (at.kind == AtomKind::Boundary) a += at.w;
        return a.value();
    }
    /// θ of an atom; atoms off the interface nodes carry no BV mass.
    double theta_of(const VarifoldAtom& at) const {
        return at.kind == AtomKind::Node && at.node >= 0 ? theta.at(at.node) : 0.0;
    }
};

/// Recompute θ at each node as (BV weight) / (varifold mass at that node).
inline void update_theta(DiscreteVarifoldSlice& V, const PhaseState& ph) {
    std::vector<double> m(ph.nodes().size(), 0.0);
    for (const auto& at : V.atoms)
        if (at.kind == AtomKind::Node) m.at(at.node) += at.w;
    V.theta.assign(m.size(), 0.0);
    for (size_t k = 0; k < m.size(); ++k) V.theta[k] = m[k] > 0.0 ? std::min(1.0, ph.nodes()[k].w / m[k]) : 0.0;
}

/// Unit-multiplicity lift: one atom per interface node with s = n_u.
inline DiscreteVarifoldSlice lift_phase_to_varifold(const PhaseState& ph) {
    DiscreteVarifoldSlice V;
    for (int k = 0; k < int(ph.nodes().size()); ++k) {
        const auto& n = ph.nodes()[k];
        V.atoms.push_back({n.x, n.n, n.w, AtomKind::Node, k});
    }
    V.theta.assign(ph.nodes().size(), 1.0);
    return V;
}

/// Hidden boundary: mass w at boundary point x, oriented along the boundary normal.
inline void add_boundary_atom(DiscreteVarifoldSlice& V, const Scene& sc, const Vec2d& x, double w) {
    const Projection pr = project(*sc.boundary, x, 0.0);
    const Vec2d n = perp(Vec2d(pr.cp.d1.normalized()));
    V.atoms.push_back({pr.cp.p, n, w, AtomKind::Boundary, -1});
}

/// Doubled-mass lift: at every node 3/2 of the weight along n_u and 1/2 along -n_u.
inline DiscreteVarifoldSlice doubled_lift(const PhaseState& ph) {
    DiscreteVarifoldSlice V;
    for (int k = 0; k < int(ph.nodes().size()); ++k) {
        const auto& n = ph.nodes()[k];
        V.atoms.push_back({n.x, n.n, 1.5 * n.w, AtomKind::Node, k});
        V.atoms.push_back({n.x, Vec2d(-n.n), 0.5 * n.w, AtomKind::Node, k});
    }
    update_theta(V, ph);
    return V;
}

/// max over test fields ψ (tangential on ∂Ω) of |Σ w ψ·s - ∫ψ·n_u dH¹|.
inline double compatibility_residual(const DiscreteVarifoldSlice& V, const PhaseState& ph, const Scene& sc) {
    double worst = 0.0;
    for (int j = 0; j < 6; ++j) {
        auto psi = [&](const Vec2d& x) {
            const double d = std::min(1.0, std::max(0.0, boundary_signed_distance(sc, x)));
            const double m = j / 2 == 0 ? 1.0 : j / 2 == 1 ? x(0) + 0.3 : x(1) * x(1) - x(0);
            return Vec2d(d * m * (j % 2 == 0 ? Vec2d(1.0, 0.0) : Vec2d(0.0, 1.0)));
        };
        Accumulator a, b;
        for (const auto& at : V.atoms) a += at.w * psi(at.x).dot(at.s);
        for (const auto& n : ph.nodes()) b += n.w * psi(n.x).dot(n.n);
        worst = std::max(worst, std::abs(a.value() - b.value()));
    }
    return worst;
}

// ---------------------------------------------------------------- interface error

struct InterfaceErrorReport {
    double E = 0.0;            ///< σ|V|(Ω̄) - σ∫ n_u·ξ dH¹
    double boundary = 0.0;     ///< σ∫_∂Ω d|V|
    double multiplicity = 0.0; ///< σ∫_Ω (1-θ) d|V|
    double bv = 0.0;           ///< σ∫_{I_u} (1 - n_u·ξ) dH¹
    double alternative = 0.0;  ///< σ∫ (1 - s·ξ) dV
    double decomposition_residual() const { return std::abs(E - boundary - multiplicity - bv); }
    double alternative_residual() const { return std::abs(E - alternative); }
};

/// ξ at every node and atom of a slice.
struct XiSamples {
    std::vector<Vec2d> at_nodes, at_atoms;
};

inline XiSamples sample_xi(const Calibration& cal, const PhaseState& ph, const DiscreteVarifoldSlice& V, double t) {
    XiSamples x;
    auto eval = [&](const Vec2d& p) {
        try {
            return cal.xi(p, t);
        } catch (const CalibrationDomainMiss&) {
            throw;
        } catch (const Error& e) {
            throw CalibrationDomainMiss(std::string("xi undefined at a quadrature node: ") + e.what());
        }
    };
    for (const auto& n : ph.nodes()) x.at_nodes.push_back(eval(n.x));
    for (const auto& at : V.atoms) x.at_atoms.push_back(at.kind == AtomKind::Node ? x.at_nodes.at(at.node) : eval(at.x));
    return x;
}

inline InterfaceErrorReport interface_error(const PhaseState& ph, const DiscreteVarifoldSlice& V, const XiSamples& xs,
                                            double sigma) {
    Accumulator mass, flux, bnd, mult, bv, alt;
    for (size_t k = 0; k < V.atoms.size(); ++k) {
        const auto& at = V.atoms[k];
        mass += at.w;
        if (at.kind == AtomKind::Boundary) bnd += at.w;
        else mult += (1.0 - V.theta_of(at)) * at.w;
        alt += at.w * (1.0 - at.s.dot(xs.at_atoms[k]));
    }
    for (size_t k = 0; k < ph.nodes().size(); ++k) {
        const auto& n = ph.nodes()[k];
        const double c = n.n.dot(xs.at_nodes[k]);
        flux += n.w * c;
        bv += n.w * (1.0 - c);
    }
    InterfaceErrorReport r;
    r.E = sigma * (mass.value() - flux.value());
    r.boundary = sigma * bnd.value();
    r.multiplicity = sigma * mult.value();
    r.bv = sigma * bv.value();
    r.alternative = sigma * alt.value();
    return r;
}

inline InterfaceErrorReport interface_error(const Calibration& cal, const PhaseState& ph,
                                            const DiscreteVarifoldSlice& V, double t) {
    return interface_error(ph, V, sample_xi(cal, ph, V, t), cal.scene().fluid.sigma);
}

// ---------------------------------------------------------------- tilt excess

/// Largest C with |ξ| ≤ max{0, 1 - C dist²(·, I_v)} on a polar sample grid.
inline double xi_length_constant(const Calibration& cal, const std::vector<double>& ts) {
    const Scene& sc = cal.scene();
    const double R = sc.is_disk() ? sc.disk_radius : 0.5 * sc.diameter();
    double C = 1e300;
    for (double t : ts)
        for (int i = 1; i <= 40; ++i)
            for (int j = 0; j < 120; ++j) {
                const double r = R * i / 40.0, a = 2.0 * kPi * (j + 0.5) / 120.0;
                const Vec2d p(r * std::cos(a), r * std::sin(a));
                if (!inside_domain(sc, p)) continue;
                const double d = interface_distance(sc, p, t);
                if (d < 1e-3) continue;
                const double x = cal.xi(p, t).norm();
                if (x > 0.0) C = std::min(C, (1.0 - x) / (d * d));
            }
    if (!(C > 0.0) || C > 1e299) throw DegenerateGeometry("no positive constant in the length bound for xi");
    return C;
}

struct TiltControls {
    double C = 0.0;            ///< constant of the length bound for ξ
    double bv_tilt = 0.0;      ///< σ∫ ½|n_u - ξ|² dH¹
    double bv_dist = 0.0;      ///< σ∫ min{1, C dist²} dH¹
    double var_tilt = 0.0;     ///< σ∫ ½|s - ξ|² dV
    double var_dist = 0.0;     ///< σ∫ min{1, C dist²} d|V|
    double multiplicity = 0.0; ///< boundary mass plus multiplicity defect
    double bv_tilt_margin = 0.0, bv_dist_margin = 0.0, var_tilt_margin = 0.0, var_dist_margin = 0.0,
           multiplicity_margin = 0.0;
    double min_margin() const {
        return std::min({bv_tilt_margin, bv_dist_margin, var_tilt_margin, var_dist_margin, multiplicity_margin});
    }
};

inline TiltControls tilt_excess_controls(const Calibration& cal, const PhaseState& ph, const DiscreteVarifoldSlice& V,
                                         const XiSamples& xs, const InterfaceErrorReport& ie, double t, double C) {
    const Scene& sc = cal.scene();
    const double sg = sc.fluid.sigma;
    auto dist_term = [&](const Vec2d& x) {
        const double d = interface_distance(sc, x, t);
        return std::min(1.0, C * d * d);
    };
    Accumulator bt, bd, vt, vd;
    for (size_t k = 0; k < ph.nodes().size(); ++k) {
        const auto& n = ph.nodes()[k];
        bt += n.w * 0.5 * (n.n - xs.at_nodes[k]).squaredNorm();
        bd += n.w * dist_term(n.x);
    }
    for (size_t k = 0; k < V.atoms.size(); ++k) {
        const auto& at = V.atoms[k];
        vt += at.w * 0.5 * (at.s - xs.at_atoms[k]).squaredNorm();
        vd += at.w * dist_term(at.x);
    }
    TiltControls c;
    c.C = C;
    c.bv_tilt = sg * bt.value();
    c.bv_dist = sg * bd.value();
    c.var_tilt = sg * vt.value();
    c.var_dist = sg * vd.value();
    c.multiplicity = ie.boundary + ie.multiplicity;
    c.bv_tilt_margin = ie.bv - c.bv_tilt;
    c.bv_dist_margin = ie.bv - c.bv_dist;
    c.var_tilt_margin = ie.E - c.var_tilt;
    c.var_dist_margin = ie.E - c.var_dist;
    c.multiplicity_margin = ie.E - c.multiplicity;
    return c;
}

// ---------------------------------------------------------------- weak data

/// Velocity of the weak solution: value, Jacobian and time derivative.
using WeakVelocity = std::function<VectorDerivs(const Vec2d&, double)>;

/// A candidate (χ_u, u, V): phase and varifold per time; u empty means u = v.
struct WeakSolution {
    std::function<PhaseState(double)> phase;
    std::function<DiscreteVarifoldSlice(const PhaseState&, double)> varifold;
    WeakVelocity u;

    DiscreteVarifoldSlice varifold_at(const PhaseState& ph, double t) const {
        return varifold ? varifold(ph, t) : lift_phase_to_varifold(ph);
    }
};

/// Weak data whose phase is bounded by the interfaces of `weak`, lifted exactly, u = v.
inline WeakSolution weak_from_scene(const Scene& weak, int panels = 64) {
    WeakSolution w;
    w.phase = [weak, panels](double t) { return phase_from_scene(weak, t, panels); };
    return w;
}

// ---------------------------------------------------------------- relative entropy

struct EntropyOptions {
    PolarOptions polar{};
    int panels = 64;         ///< Gauss panels per curve of the strong phase
    double length_C = 0.0;   ///< constant for the dist² controls; 0 = fit on the fly
    bool controls = true;
};

struct EntropyReport {
    double t = 0.0;
    double E = 0.0;
    double kinetic = 0.0;
    InterfaceErrorReport interface;
    double E_vol = 0.0;
    TiltControls tilt;
};

/// Piecewise-constant phase values on one arc of the polar rule.
struct ArcPhases {
    double chi_u = 0.0, chi_v = 0.0;
};

inline auto arc_phases(const PhaseState& pu, const PhaseState& pv) {
    return [&pu, &pv](const Vec2d& m) { return std::optional<ArcPhases>(ArcPhases{pu.chi(m), pv.chi(m)}); };
}

inline double kinetic_energy(const Calibration& cal, const PhaseState& pu, const PhaseState& pv, const WeakVelocity& u,
                             double t, const PolarOptions& po = {}) {
    if (!u) return 0.0;
    const Scene& sc = cal.scene();
    PolarQuadrature Q(sc, {&pu, &pv}, po);
    return Q.integrate(arc_phases(pu, pv), [&](const Vec2d& p, const ArcPhases& a) {
        const Vec2d d = u(p, t).value - sc.velocity(p, t);
        return 0.5 * sc.fluid.rho(a.chi_u) * d.squaredNorm();
    });
}

/// ∫ |χ_u - χ_v| |ϑ| over the symmetric difference.
inline double bulk_error(const Calibration& cal, const PhaseState& pu, const PhaseState& pv, double t,
                         const PolarOptions& po = {}) {
    PolarQuadrature Q(cal.scene(), {&pu, &pv}, po);
    auto arc = [&](const Vec2d& m) -> std::optional<ArcPhases> {
        ArcPhases a{pu.chi(m), pv.chi(m)};
        if (a.chi_u == a.chi_v) return std::nullopt;
        return a;
    };
    return Q.integrate(arc, [&](const Vec2d& p, const ArcPhases&) { return std::abs(theta_weight(cal, p, t)); });
}

inline EntropyReport relative_entropy(const Calibration& cal, const WeakSolution& w, double t,
                                      const EntropyOptions& opt = {}) {
    const Scene& sc = cal.scene();
    const PhaseState pu = w.phase(t);
    const PhaseState pv = phase_from_scene(sc, t, opt.panels);
    const DiscreteVarifoldSlice V = w.varifold_at(pu, t);
    const XiSamples xs = sample_xi(cal, pu, V, t);
    EntropyReport r;
    r.t = t;
    r.interface = interface_error(pu, V, xs, sc.fluid.sigma);
    r.kinetic = kinetic_energy(cal, pu, pv, w.u, t, opt.polar);
    r.E = r.kinetic + r.interface.E;
    r.E_vol = bulk_error(cal, pu, pv, t, opt.polar);
    if (opt.controls) {
        const double C = opt.length_C > 0.0 ? opt.length_C : xi_length_constant(cal, {t});
        r.tilt = tilt_excess_controls(cal, pu, V, xs, r.interface, t, C);
    }
    return r;
}

/// Evaluate f(i) for i < n on worker threads; results keep their index.
template <class F> auto parallel_map(int n, F&& f) -> std::vector<decltype(f(0))> {
    using R = decltype(f(0));
    std::vector<R> out(n);
    const int nw = std::max(1, std::min(n, int(std::thread::hardware_concurrency())));
    std::vector<std::future<void>> jobs;
    std::exception_ptr err;
    std::mutex m;
    for (int k = 0; k < nw; ++k)
        jobs.push_back(std::async(std::launch::async, [&, k] {
            for (int i = k; i < n; i += nw) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> l(m);
                    if (!err) err = std::current_exception();
                }
            }
        }));
    for (auto& j : jobs) j.get();
    if (err) std::rethrow_exception(err);
    return out;
}

inline std::vector<EntropyReport> entropy_series(const Calibration& cal, const WeakSolution& w,
                                                 const std::vector<double>& ts, EntropyOptions opt = {}) {
    if (opt.controls && opt.length_C <= 0.0) opt.length_C = xi_length_constant(cal, time_slices(cal.scene().horizon, 3));
    return parallel_map(int(ts.size()), [&](int i) { return relative_entropy(cal, w, ts[i], opt); });
}

// ---------------------------------------------------------------- time evolution

/// Integrands at one instant of every term of the relative entropy inequality.
struct InequalityIntegrands {
    double E = 0.0;
    double dissipation = 0.0;
    double R_dt = 0.0;
    double R_adv[2] = {0.0, 0.0};
    double R_surTen[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    double surten() const {
        double s = 0.0;
        for (double x : R_surTen) s += x;
        return s;
    }
};

inline InequalityIntegrands inequality_integrands(const Calibration& cal, const WeakSolution& w, double t,
                                                  const EntropyOptions& opt = {}) {
    const Scene& sc = cal.scene();
    const FluidParams& fl = sc.fluid;
    const double sg = fl.sigma;
    const PhaseState pu = w.phase(t);
    const DiscreteVarifoldSlice V = w.varifold_at(pu, t);
    InequalityIntegrands I;

    std::vector<VectorDerivs> xn;
    std::vector<VectorDerivs> vn;
    for (const auto& n : pu.nodes()) {
        xn.push_back(cal.xi_derivs(n.x, t));
        vn.push_back(sc.velocity.derivs(n.x, t));
    }
    Accumulator s1, s2, s3, s5, s6, s7, s8, mass, flux;
    for (const auto& at : V.atoms) {
        const Vec2d xi = at.kind == AtomKind::Node ? xn[at.node].value : cal.xi(at.x, t);
        const Mat2d G = at.kind == AtomKind::Node ? vn[at.node].jac : sc.velocity.derivs(at.x, t).jac;
        const Vec2d d = at.s - xi;
        s1 += -at.w * d.dot(G * d);
        if (at.kind == AtomKind::Boundary) s3 += at.w * xi.dot(G * xi);
        else s2 += (1.0 - V.theta_of(at)) * at.w * xi.dot(G * xi);
        mass += at.w;
    }
    for (size_t k = 0; k < pu.nodes().size(); ++k) {
        const auto& n = pu.nodes()[k];
        const VectorDerivs& X = xn[k];
        const VectorDerivs& v = vn[k];
        const Vec2d xi = X.value, d = n.n - xi;
        s5 += -n.w * d.dot(transport_residual(X, v));
        s6 += -n.w * d.dot(xi) * xi.dot(v.jac * xi);
        s7 += -n.w * 0.5 * length_evolution(X, v);
        s8 += n.w * (1.0 - n.n.dot(xi)) * v.divergence();
        flux += n.w * n.n.dot(xi);
    }
    I.R_surTen[0] = sg * s1.value();
    I.R_surTen[1] = sg * s2.value();
    I.R_surTen[2] = sg * s3.value();
    I.R_surTen[4] = sg * s5.value();
    I.R_surTen[5] = sg * s6.value();
    I.R_surTen[6] = sg * s7.value();
    I.R_surTen[7] = sg * s8.value();
    I.E = sg * (mass.value() - flux.value());

    if (w.u) {
        const PhaseState pv = phase_from_scene(sc, t, opt.panels);
        PolarQuadrature Q(sc, {&pu, &pv}, opt.polar);
        const auto arcs = arc_phases(pu, pv);
        const double h = 1e-5;
        auto div_xi = [&](const Vec2d& p) { return cal.xi_derivs(p, t).divergence(); };
        double kin = 0.0, diss = 0.0, rdt = 0.0, ra0 = 0.0, ra1 = 0.0, s4 = 0.0;
        kin = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases& a) {
            const Vec2d d = w.u(p, t).value - sc.velocity(p, t);
            return 0.5 * fl.rho(a.chi_u) * d.squaredNorm();
        });
        diss = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases&) {
            const Mat2d D = w.u(p, t).jac - sc.velocity.derivs(p, t).jac;
            return 0.5 * fl.mu * (D + D.transpose()).squaredNorm();
        });
        rdt = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases& a) {
            const VectorDerivs v = sc.velocity.derivs(p, t);
            const Vec2d d = w.u(p, t).value - v.value;
            return -(fl.rho(a.chi_v) - fl.rho(a.chi_u)) * d.dot(v.dt);
        });
        ra0 = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases& a) {
            const VectorDerivs v = sc.velocity.derivs(p, t);
            const Vec2d d = w.u(p, t).value - v.value;
            return -(fl.rho(a.chi_u) - fl.rho(a.chi_v)) * d.dot(v.jac * v.value);
        });
        ra1 = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases& a) {
            const VectorDerivs v = sc.velocity.derivs(p, t);
            const Vec2d d = w.u(p, t).value - v.value;
            return -fl.rho(a.chi_u) * d.dot(v.jac * d);
        });
        auto sd = [&](const Vec2d& m) -> std::optional<ArcPhases> {
            ArcPhases a{pu.chi(m), pv.chi(m)};
            if (a.chi_u == a.chi_v) return std::nullopt;
            return a;
        };
        s4 = Q.integrate(sd, [&](const Vec2d& p, const ArcPhases& a) {
            const Vec2d d = w.u(p, t).value - sc.velocity(p, t);
            const Vec2d g((div_xi(p + Vec2d(h, 0)) - div_xi(p - Vec2d(h, 0))) / (2 * h),
                          (div_xi(p + Vec2d(0, h)) - div_xi(p - Vec2d(0, h))) / (2 * h));
            return (a.chi_u - a.chi_v) * d.dot(g);
        });
        I.E += kin;
        I.dissipation = diss;
        I.R_dt = rdt;
        I.R_adv[0] = ra0;
        I.R_adv[1] = ra1;
        I.R_surTen[3] = sg * s4;
    }
    return I;
}

struct InequalityTerms {
    double T = 0.0;
    int steps = 0;
    double E_T = 0.0, E_0 = 0.0;
    double dissipation = 0.0;
    double R_dt = 0.0;
    double R_adv = 0.0;
    double R_surTen[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    double surten() const {
        double s = 0.0;
        for (double x : R_surTen) s += x;
        return s;
    }
    /// E(T') + dissipation - E(0) - R_dt - R_adv - R_surTen.
    double margin() const { return E_T + dissipation - E_0 - R_dt - R_adv - surten(); }
    /// Scale of the balance, used to judge the margin.
    double magnitude() const {
        double s = std::abs(E_T - E_0) + std::abs(dissipation) + std::abs(R_dt) + std::abs(R_adv);
        for (double x : R_surTen) s += std::abs(x);
        return s;
    }
};

/// Space-time quadrature of every term on [0, T'] with `steps` trapezoid intervals.
inline InequalityTerms rel_entropy_inequality_terms(const Calibration& cal, const WeakSolution& w, double T,
                                                    int steps, const EntropyOptions& opt = {}) {
    const auto I = parallel_map(steps + 1, [&](int k) { return inequality_integrands(cal, w, T * k / steps, opt); });
    InequalityTerms r;
    r.T = T;
    r.steps = steps;
    r.E_0 = I.front().E;
    r.E_T = I.back().E;
    const double h = T / steps;
    for (int k = 0; k <= steps; ++k) {
        const double c = (k == 0 || k == steps) ? 0.5 * h : h;
        r.dissipation += c * I[k].dissipation;
        r.R_dt += c * I[k].R_dt;
        r.R_adv += c * (I[k].R_adv[0] + I[k].R_adv[1]);
        for (int j = 0; j < 8; ++j) r.R_surTen[j] += c * I[k].R_surTen[j];
    }
    return r;
}

struct InequalityRefinement {
    std::vector<InequalityTerms> levels;
    std::vector<double> ratios; ///< |margin(Δt)| / |margin(Δt/2)|
    bool exact = false;         ///< all margins at rounding level
    double tolerance() const { return std::abs(levels.back().margin()); }
};

/// Margins at Δt, Δt/2, ...; TimeSamplingTooCoarse when the two finest levels
/// differ by more than 10% of the balance magnitude.
inline InequalityRefinement inequality_refinement(const Calibration& cal, const WeakSolution& w, double T, int steps0,
                                                  int levels = 3, const EntropyOptions& opt = {}) {
    InequalityRefinement R;
    for (int l = 0; l < levels; ++l) R.levels.push_back(rel_entropy_inequality_terms(cal, w, T, steps0 << l, opt));
    const double floor_ = 1e-12;
    R.exact = true;
    for (const auto& L : R.levels) R.exact = R.exact && std::abs(L.margin()) <= floor_;
    for (int l = 0; l + 1 < levels; ++l)
        R.ratios.push_back(std::abs(R.levels[l].margin()) / std::max(std::abs(R.levels[l + 1].margin()), 1e-300));
    const auto& a = R.levels[levels - 2];
    const auto& b = R.levels[levels - 1];
    if (std::abs(a.margin() - b.margin()) > 0.1 * std::max(b.magnitude(), floor_))
        throw TimeSamplingTooCoarse("margin changes by more than 10% under time refinement");
    return R;
}

// ---------------------------------------------------------------- bulk error evolution

struct BulkEvolutionCheck {
    double lhs = 0.0;       ///< d/dt E_vol by central differences
    double transport = 0.0; ///< ∫ (χ_u - χ_v)(∂_t ϑ + v·∇ϑ)
    double relative = 0.0;  ///< ∫ (χ_u - χ_v)((u - v)·∇)ϑ
    double residual() const { return std::abs(lhs - transport - relative); }
};

inline BulkEvolutionCheck bulk_error_evolution(const Calibration& cal, const WeakSolution& w, double t, double h,
                                               const PolarOptions& po = {}) {
    const Scene& sc = cal.scene();
    auto Ev = [&](double s) {
        const PhaseState pu = w.phase(s), pv = phase_from_scene(sc, s);
        return bulk_error(cal, pu, pv, s, po);
    };
    BulkEvolutionCheck c;
    c.lhs = (Ev(t + h) - Ev(t - h)) / (2.0 * h);
    const PhaseState pu = w.phase(t), pv = phase_from_scene(sc, t);
    PolarQuadrature Q(sc, {&pu, &pv}, po);
    auto sd = [&](const Vec2d& m) -> std::optional<ArcPhases> {
        ArcPhases a{pu.chi(m), pv.chi(m)};
        if (a.chi_u == a.chi_v) return std::nullopt;
        return a;
    };
    c.transport = Q.integrate(sd, [&](const Vec2d& p, const ArcPhases& a) {
        const ScalarDerivs th = theta_weight_derivs(cal, p, t);
        return (a.chi_u - a.chi_v) * th.advective(sc.velocity(p, t));
    });
    if (w.u)
        c.relative = Q.integrate(sd, [&](const Vec2d& p, const ArcPhases& a) {
            const ScalarDerivs th = theta_weight_derivs(cal, p, t);
            return (a.chi_u - a.chi_v) * th.grad.dot(w.u(p, t).value - sc.velocity(p, t));
        });
    return c;
}

// ---------------------------------------------------------------- slicing coercivity

struct SlicingCheck {
    double lhs = 0.0;      ///< ∫∫ |χ_v - χ_u| |u - v|
    double entropy = 0.0;  ///< ∫ E + E_vol dt
    double gradient = 0.0; ///< ∫∫ |∇u - ∇v|²
    double C = 0.0;        ///< smallest C making the bound hold on the δ grid
    std::vector<double> deltas, margins;
};

inline SlicingCheck slicing_coercivity_check(const Calibration& cal, const WeakSolution& w, double T, int steps,
                                             const std::vector<double>& deltas, const EntropyOptions& opt = {}) {
    const Scene& sc = cal.scene();
    struct Slice {
        double lhs = 0, ent = 0, grad = 0;
    };
    EntropyOptions eo = opt;
    eo.controls = false;
    const auto S = parallel_map(steps + 1, [&](int k) {
        const double t = T * k / steps;
        Slice s;
        const EntropyReport e = relative_entropy(cal, w, t, eo);
        s.ent = e.E + e.E_vol;
        if (w.u) {
            const PhaseState pu = w.phase(t), pv = phase_from_scene(sc, t, opt.panels);
            PolarQuadrature Q(sc, {&pu, &pv}, opt.polar);
            const auto arcs = arc_phases(pu, pv);
            s.lhs = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases& a) {
                return std::abs(a.chi_v - a.chi_u) * (w.u(p, t).value - sc.velocity(p, t)).norm();
            });
            s.grad = Q.integrate(arcs, [&](const Vec2d& p, const ArcPhases&) {
                return (w.u(p, t).jac - sc.velocity.derivs(p, t).jac).squaredNorm();
            });
        }
        return s;
    });
    SlicingCheck c;
    const double h = T / steps;
    for (int k = 0; k <= steps; ++k) {
        const double q = (k == 0 || k == steps) ? 0.5 * h : h;
        c.lhs += q * S[k].lhs;
        c.entropy += q * S[k].ent;
        c.gradient += q * S[k].grad;
    }
    c.deltas = deltas;
    for (double d : deltas) {
        const double need = c.lhs - d * c.gradient;
        if (need > 0.0) {
            if (c.entropy <= 0.0) c.C = std::numeric_limits<double>::infinity();
            else c.C = std::max(c.C, d * need / c.entropy);
        }
    }
    for (double d : deltas) c.margins.push_back(c.C / d * c.entropy + d * c.gradient - c.lhs);
    return c;
}

} // namespace calib
