#pragma once

// Orchestration behind the CLI: verification suites, the Gronwall experiment
// and marker evolution, each writing CSV tables plus a JSON summary.

#include "calib/report.hpp"
#include "calib/scene_io.hpp"
#include "calib/transport_sim.hpp"

#include <boost/math/tools/roots.hpp>

#include <cstdlib>

namespace calib {

struct ExperimentConfig {
    std::string scene;                ///< path; empty selects the built-in fixture
    std::vector<std::string> suites;  ///< bulk, contact, calibration, weight; empty = all
    std::optional<int> samples;       ///< boundary/interface samples (10x for the dense checks)
    double fd_step = 1e-5;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::string out;                  ///< empty = $CALIB_OUT_DIR or ./calib-out
    std::uint64_t seed = 20240607;
    // gronwall
    std::string preset = "radial_shear";
    double eps = 0.05;
    int grid_points = 100;
    // evolve
    int markers = 512;
};

inline std::filesystem::path output_dir(const ExperimentConfig& cfg) {
    if (!cfg.out.empty()) return cfg.out;
    if (const char* e = std::getenv("CALIB_OUT_DIR"); e && *e) return e;
    return "calib-out";
}

/// 2 for configuration, scene and IO problems, 1 for everything else.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const SceneError*>(&e) ||
        dynamic_cast<const AngleViolation*>(&e) || dynamic_cast<const FixtureInconsistent*>(&e))
        return 2;
    return 1;
}

inline void check_config(const ExperimentConfig& cfg) {
    if (cfg.samples && *cfg.samples <= 0) throw SceneError("--samples must be positive");
    if (!(cfg.fd_step > 0.0)) throw SceneError("--fd-step must be positive");
    if (cfg.dt && !(*cfg.dt > 0.0)) throw SceneError("--dt must be positive");
    if (cfg.horizon && !(*cfg.horizon > 0.0)) throw SceneError("--horizon must be positive");
    if (!(cfg.eps >= 0.0)) throw SceneError("--eps must be non-negative");
    if (cfg.grid_points < 2) throw SceneError("--grid must be at least 2");
}

inline Scene scene_for(const ExperimentConfig& cfg, const VelocityField& fallback) {
    Scene sc = cfg.scene.empty() ? disk_diameter(fallback) : load_scene(cfg.scene);
    if (cfg.horizon) sc.horizon = *cfg.horizon;
    validate_scene(sc);
    return sc;
}

// ---------------------------------------------------------------- verify

struct VerifyRun {
    int status = 0;
    std::vector<SuiteReport> reports;
    Json summary;
};

inline VerifyOptions verify_options(const ExperimentConfig& cfg) {
    VerifyOptions o;
    if (cfg.samples) {
        o.boundary_samples = o.interface_samples = *cfg.samples;
        o.length_samples = o.sign_samples = o.identity_samples = 10 * *cfg.samples;
    }
    o.fd_step = cfg.fd_step;
    o.seed = cfg.seed;
    return o;
}

/// Runs the selected suites in parallel; results keep the registration order.
inline VerifyRun run_verify(const ExperimentConfig& cfg, bool write = true) {
    check_config(cfg);
    const Scene sc = scene_for(cfg, VelocityField::rotation(1.0));
    const Calibration cal = make_calibration(sc);
    const VerifyOptions opt = verify_options(cfg);

    auto wanted = [&](const std::string& s) {
        return cfg.suites.empty() || std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end();
    };
    for (const auto& s : cfg.suites)
        if (s != "bulk" && s != "contact" && s != "calibration" && s != "weight")
            throw SceneError("unknown suite '" + s + "'");

    std::vector<std::pair<std::string, std::function<SuiteReport()>>> tasks;
    if (wanted("bulk"))
        for (int i = 0; i < int(sc.interfaces.size()); ++i)
            tasks.push_back({"bulk-" + std::to_string(i), [&, i] { return verify_bulk_properties(sc, i, opt); }});
    if (wanted("contact"))
        for (int c = 0; c < int(cal.radii().contacts.size()); ++c)
            tasks.push_back(
                {"contact-" + std::to_string(c), [&, c] { return verify_contact_properties(cal, c, opt); }});
    if (wanted("calibration")) tasks.push_back({"calibration", [&] { return verify_calibration_field(cal, opt); }});
    if (wanted("weight")) tasks.push_back({"weight", [&] { return verify_weight_field(cal, opt); }});

    VerifyRun run;
    run.reports = parallel_map(int(tasks.size()), [&](int k) {
        SuiteReport r = tasks[k].second();
        r.suite = tasks[k].first;
        return r;
    });

    Json& j = run.summary;
    j["schema"] = kReportSchema;
    j["command"] = "verify-calibration";
    j["scene"] = sc.name;
    j["seed"] = cfg.seed;
    j["fd_step"] = cfg.fd_step;
    j["calibration"] = {{"r_hat", cal.r_hat()}, {"delta", cal.delta()}, {"scale", cal.scale()}};
    Json suites = Json::array();
    bool ok = true;
    for (const auto& r : run.reports) {
        suites.push_back(suite_json(r));
        ok = ok && r.passed();
    }
    j["suites"] = std::move(suites);
    j["passed"] = ok;
    run.status = ok ? 0 : 1;

    if (write) {
        const auto dir = output_dir(cfg);
        for (const auto& r : run.reports) write_csv(dir / (r.suite + ".csv"), suite_table(r));
        write_json(dir / "verify-summary.json", j);
    }
    return run;
}

// ---------------------------------------------------------------- gronwall

/// Smallest C ≥ 1 with E_k ≤ C e^{C t_k} E_ref at every sample.
inline double gronwall_constant(const std::vector<double>& ts, const std::vector<double>& E, double E_ref,
                                double tol = 1e-10) {
    if (E_ref <= tol) {
        for (std::size_t k = 0; k < E.size(); ++k)
            if (E[k] > tol)
                throw DegenerateFit("reference value vanishes but the functional reaches " + format_number(E[k]) +
                                    " at t = " + format_number(ts[k]));
        return 1.0;
    }
    double C = 1.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double q = E[k] / E_ref;
        if (q <= C * std::exp(C * ts[k])) continue;
        auto f = [&](double c) { return std::log(c) + c * ts[k] - std::log(q); };
        double hi = 2.0 * C;
        while (f(hi) < 0.0) hi *= 2.0;
        std::uintmax_t it = 200;
        const auto br = boost::math::tools::toms748_solve(f, C, hi, boost::math::tools::eps_tolerance<double>(50), it);
        C = br.second;
    }
    return C;
}

struct GronwallRun {
    int status = 0;
    std::vector<EntropyReport> series;
    double C = 0.0, C_vol = 0.0;
    std::vector<double> bound, bound_vol, envelope;
    bool envelope_holds = false;
    double max_rel_change = 0.0, max_rel_change_vol = 0.0;  ///< max |E(t)/E(0) - 1|
    Table table;
    Json summary;
};

inline VelocityField preset_velocity(const std::string& preset) {
    if (preset == "rotation") return VelocityField::rotation(1.0);
    if (preset == "radial_shear") return VelocityField::radial_shear(1.0, 2.0);
    if (preset == "zero") return VelocityField::zero();
    throw SceneError("unknown preset '" + preset + "'");
}

inline GronwallRun run_gronwall(const ExperimentConfig& cfg, bool write = true, EntropyOptions eopt = {}) {
    check_config(cfg);
    Scene strong = scene_for(cfg, preset_velocity(cfg.preset));
    if (cfg.scene.empty()) strong.horizon = cfg.horizon.value_or(0.5);
    const double T = strong.horizon;
    const Scene weak_scene = rotated_copy(strong, cfg.eps);
    const WeakSolution weak = weak_from_scene(weak_scene, eopt.panels);
    const Calibration cal = make_calibration(strong);

    std::vector<double> ts;
    if (cfg.dt) ts = uniform_grid(T, *cfg.dt);
    else {
        ts.resize(cfg.grid_points);
        for (int k = 0; k < cfg.grid_points; ++k) ts[k] = T * k / (cfg.grid_points - 1);
    }

    GronwallRun g;
    g.series = entropy_series(cal, weak, ts, eopt);
    std::vector<double> E, Ev, Etot;
    for (const auto& r : g.series) {
        E.push_back(r.E);
        Ev.push_back(r.E_vol);
    }
    const double E0 = E.front(), Ev0 = Ev.front();
    g.C = gronwall_constant(ts, E, E0);
    g.C_vol = gronwall_constant(ts, Ev, E0 + Ev0);
    g.envelope_holds = true;
    double run_max = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        g.bound.push_back(g.C * std::exp(g.C * ts[k]) * E0);
        g.bound_vol.push_back(g.C_vol * std::exp(g.C_vol * ts[k]) * (E0 + Ev0));
        run_max = std::max(run_max, E[k]);
        g.envelope.push_back(run_max);
        const double slack = 1e-12 * std::max(1.0, g.bound[k]);
        g.envelope_holds = g.envelope_holds && E[k] <= g.bound[k] + slack &&
                           Ev[k] <= g.bound_vol[k] + 1e-12 * std::max(1.0, g.bound_vol[k]);
        if (E0 > 0.0) g.max_rel_change = std::max(g.max_rel_change, std::abs(E[k] / E0 - 1.0));
        if (Ev0 > 0.0) g.max_rel_change_vol = std::max(g.max_rel_change_vol, std::abs(Ev[k] / Ev0 - 1.0));
    }
    g.status = g.envelope_holds && std::isfinite(g.C) && std::isfinite(g.C_vol) ? 0 : 1;

    g.table.kind = "gronwall";
    g.table.columns = {"t",  "E",            "E_vol",         "kinetic",       "interface",   "boundary",
                       "multiplicity", "bv", "decomposition_residual", "tilt_min_margin", "bound", "bound_vol",
                       "running_max"};
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto& r = g.series[k];
        g.table.rows.push_back({ts[k], r.E, r.E_vol, r.kinetic, r.interface.E, r.interface.boundary,
                                r.interface.multiplicity, r.interface.bv, r.interface.decomposition_residual(),
                                eopt.controls ? r.tilt.min_margin() : 0.0, g.bound[k], g.bound_vol[k],
                                g.envelope[k]});
    }

    Json& j = g.summary;
    j["schema"] = kReportSchema;
    j["command"] = "gronwall";
    j["scene"] = strong.name;
    j["velocity"] = strong.velocity.name();
    j["eps"] = cfg.eps;
    j["horizon"] = T;
    j["grid_points"] = ts.size();
    j["E0"] = E0;
    j["E_vol0"] = Ev0;
    j["C"] = number_json(g.C);
    j["C_vol"] = number_json(g.C_vol);
    j["envelope_holds"] = g.envelope_holds;
    j["max_rel_change_E"] = g.max_rel_change;
    j["max_rel_change_E_vol"] = g.max_rel_change_vol;
    j["passed"] = g.status == 0;
    if (write) {
        const auto dir = output_dir(cfg);
        write_csv(dir / "gronwall.csv", g.table);
        write_json(dir / "gronwall-summary.json", j);
    }
    return g;
}

// ---------------------------------------------------------------- evolve

struct EvolveRun {
    int status = 0;
    Trajectory trajectory;
    PerimeterRateCheck perimeter;
    double area_drift = 0.0;  ///< relative
    Table table;
    Json summary;
};

/// Markers in parametric order: panel end, its inner nodes, ..., last end.
inline std::vector<Vec2d> ordered_markers(const MarkerCurve& c) {
    std::vector<Vec2d> out;
    for (int p = 0; p < c.panels(); ++p) {
        out.push_back(c.ends()[p]);
        for (int j = 0; j < MarkerCurve::M; ++j) out.push_back(c.inner()[p * MarkerCurve::M + j]);
    }
    if (!c.closed()) out.push_back(c.ends().back());
    return out;
}

inline EvolveRun run_evolve(const ExperimentConfig& cfg, bool write = true) {
    check_config(cfg);
    const Scene sc = scene_for(cfg, VelocityField::rotation(1.0));
    const double dt = cfg.dt.value_or(1e-2);
    EvolveOptions eo;
    eo.markers = cfg.markers;
    EvolveRun e;
    e.trajectory = evolve(sc, uniform_grid(sc.horizon, dt), eo);
    const auto& tr = e.trajectory;
    if (tr.times.size() >= 3) e.perimeter = perimeter_rate_check(sc, tr);
    for (double a : tr.area)
        e.area_drift = std::max(e.area_drift, std::abs(a - tr.area.front()) / std::abs(tr.area.front()));

    e.table.kind = "trajectory";
    e.table.columns = {"t", "interface", "marker", "x1", "x2"};
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        for (std::size_t i = 0; i < tr.curves[k].size(); ++i) {
            const auto pts = ordered_markers(tr.curves[k][i]);
            for (std::size_t m = 0; m < pts.size(); ++m)
                e.table.rows.push_back({tr.times[k], double(i), double(m), pts[m](0), pts[m](1)});
        }

    Json& j = e.summary;
    j["schema"] = kReportSchema;
    j["command"] = "evolve";
    j["scene"] = sc.name;
    j["velocity"] = sc.velocity.name();
    j["dt"] = dt;
    j["horizon"] = sc.horizon;
    j["steps"] = tr.times.size() - 1;
    j["redistributions"] = tr.redistributions;
    j["perimeter_initial"] = tr.perimeter.front();
    j["perimeter_final"] = tr.perimeter.back();
    j["perimeter_rate_residual"] = e.perimeter.residual;
    j["area_relative_drift"] = e.area_drift;
    double bd = 0.0, ang = 0.0;
    for (const auto& c : tr.contacts) {
        bd = std::max(bd, c.max_boundary_distance);
        ang = std::max(ang, c.max_angle_deviation_deg);
    }
    j["max_contact_boundary_distance"] = bd;
    j["max_contact_angle_deviation_deg"] = ang;
    if (write) {
        const auto dir = output_dir(cfg);
        write_csv(dir / "trajectory.csv", e.table);
        write_json(dir / "evolve-summary.json", j);
    }
    return e;
}

} // namespace calib
