#pragma once

// Scene files (YAML). Validation errors carry file:line:column of the offending node.

#include "calib/geometry.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace calib {

namespace detail {

inline std::string where(const std::string& file, const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.line < 0) return file;
    return file + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

class SceneReader {
public:
    explicit SceneReader(std::string file) : file_(std::move(file)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
        throw SceneError(where(file_, n) + ": " + msg);
    }

    void keys(const YAML::Node& n, std::initializer_list<const char*> allowed) const {
        if (!n.IsMap()) fail(n, "expected a mapping");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : n) {
            const std::string k = kv.first.as<std::string>();
            if (!ok.count(k)) fail(kv.first, "unknown key '" + k + "'");
        }
    }

    double num(const YAML::Node& n, const char* key, std::optional<double> def = std::nullopt) const {
        const YAML::Node v = n[key];
        if (!v) {
            if (def) return *def;
            fail(n, std::string("missing key '") + key + "'");
        }
        try {
            return v.as<double>();
        } catch (const YAML::Exception&) {
            fail(v, std::string("'") + key + "' must be a number");
        }
    }

    double positive(const YAML::Node& n, const char* key, std::optional<double> def = std::nullopt) const {
        const double x = num(n, key, def);
        if (!(x > 0.0)) fail(n[key] ? n[key] : n, std::string("'") + key + "' must be positive");
        return x;
    }

    std::string str(const YAML::Node& n, const char* key, std::optional<std::string> def = std::nullopt) const {
        const YAML::Node v = n[key];
        if (!v) {
            if (def) return *def;
            fail(n, std::string("missing key '") + key + "'");
        }
        if (!v.IsScalar()) fail(v, std::string("'") + key + "' must be a string");
        return v.as<std::string>();
    }

    bool flag(const YAML::Node& n, const char* key, bool def) const {
        const YAML::Node v = n[key];
        if (!v) return def;
        try {
            return v.as<bool>();
        } catch (const YAML::Exception&) {
            fail(v, std::string("'") + key + "' must be true or false");
        }
    }

    std::shared_ptr<const InitialCurve> shape(const YAML::Node& n, double R) const {
        keys(n, {"shape", "angle", "offset", "rho", "plus_contains_center", "center", "radius"});
        const std::string s = str(n, "shape");
        if (s == "diameter") return shapes::diameter(num(n, "angle"), R);
        if (s == "chord") {
            const double off = num(n, "offset");
            if (std::abs(off) >= R) fail(n["offset"], "chord offset must be smaller than the disk radius");
            return shapes::chord(num(n, "angle"), off, R);
        }
        if (s == "orthogonal_arc")
            return shapes::orthogonal_arc(num(n, "angle"), positive(n, "rho"), flag(n, "plus_contains_center", true),
                                          R);
        if (s == "circle") {
            const YAML::Node c = n["center"];
            if (!c || !c.IsSequence() || c.size() != 2) fail(c ? c : n, "'center' must be a pair [x1, x2]");
            return shapes::circle(Vec2d(c[0].as<double>(), c[1].as<double>()), positive(n, "radius"));
        }
        fail(n["shape"], "unknown interface shape '" + s + "'");
    }

    VelocityField velocity(const YAML::Node& n, double R) const {
        if (!n) return VelocityField::zero();
        keys(n, {"preset", "omega", "shear", "amplitude"});
        const std::string p = str(n, "preset");
        if (p == "zero") return VelocityField::zero();
        if (p == "rotation") return VelocityField::rotation(num(n, "omega", 1.0), R);
        if (p == "radial_shear") return VelocityField::radial_shear(num(n, "omega", 1.0), num(n, "shear", 2.0), R);
        if (p == "dipole") return VelocityField::dipole(num(n, "amplitude", 1.0), R);
        fail(n["preset"], "unknown velocity preset '" + p + "'");
    }

private:
    std::string file_;
};

} // namespace detail

/// Parse a scene from YAML text; `file` is used in error messages only.
inline Scene parse_scene(const std::string& text, const std::string& file = "<scene>") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw SceneError(file + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                         ": " + e.msg);
    }
    detail::SceneReader rd(file);
    rd.keys(root, {"name", "domain", "interfaces", "velocity", "fluid", "horizon", "angle_tolerance_deg", "calibration"});

    DomainSpec dom;
    if (const YAML::Node d = root["domain"]) {
        rd.keys(d, {"kind", "radius", "a", "b"});
        dom.kind = rd.str(d, "kind", "disk");
        if (dom.kind == "disk") dom.radius = rd.positive(d, "radius", 1.0);
        else if (dom.kind == "ellipse") {
            dom.a = rd.positive(d, "a");
            dom.b = rd.positive(d, "b");
        } else rd.fail(d["kind"], "unknown domain kind '" + dom.kind + "'");
    }
    const double R = dom.kind == "disk" ? dom.radius : std::max(dom.a, dom.b);

    const YAML::Node is = root["interfaces"];
    if (!is || !is.IsSequence() || is.size() == 0) rd.fail(is ? is : root, "'interfaces' must be a non-empty list");
    std::vector<std::shared_ptr<const InitialCurve>> curves;
    for (const auto& n : is) curves.push_back(rd.shape(n, R));

    FluidParams fl;
    if (const YAML::Node f = root["fluid"]) {
        rd.keys(f, {"sigma", "mu", "rho_plus", "rho_minus"});
        fl.sigma = rd.positive(f, "sigma", 1.0);
        fl.mu = rd.positive(f, "mu", 1.0);
        fl.rho_plus = rd.positive(f, "rho_plus", 1.0);
        fl.rho_minus = rd.positive(f, "rho_minus", 1.0);
    }
    const double horizon = rd.positive(root, "horizon", 1.0);

    Scene sc;
    try {
        sc = make_scene(dom, curves, rd.velocity(root["velocity"], R), horizon, fl);
    } catch (const SceneError& e) {
        std::string m = e.what();
        m = m.substr(m.find(": ") + 2);
        rd.fail(root["velocity"] ? root["velocity"] : root, m);
    }
    sc.name = rd.str(root, "name", "scene");
    sc.angle_tolerance_deg = rd.positive(root, "angle_tolerance_deg", 2.0);
    if (const YAML::Node c = root["calibration"]) {
        rd.keys(c, {"r_hat", "delta"});
        if (c["r_hat"]) sc.r_hat = rd.positive(c, "r_hat");
        if (c["delta"]) {
            const double d = rd.positive(c, "delta");
            if (d > 1.0) rd.fail(c["delta"], "'delta' must lie in (0, 1]");
            sc.delta = d;
        }
    }
    return sc;
}

/// Contact endpoints on ∂Ω and 90° contact angles at t = 0.
inline void validate_scene(const Scene& sc) {
    for (const auto& id : contact_ids(sc)) contact_frame<double>(sc, id.interface, id.end, 0.0, true);
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str(), path);
}

} // namespace calib
