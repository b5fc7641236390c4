#pragma once

// Prescribed divergence-free velocity fields, tangential on the disk boundary.

#include "calib/core.hpp"
#include "calib/curves.hpp"

#include <optional>
#include <string>
#include <variant>

namespace calib {

namespace flow {

struct Zero {
    template <class T> Vec2<T> eval(const Vec2<T>&, const T&) const { return Vec2<T>(T(0.0), T(0.0)); }
};

/// Azimuthal flow v = ω(r)(-x2, x1); rigid rotation when a = 0.
struct Azimuthal {
    AzimuthalProfile w;
    template <class T> Vec2<T> eval(const Vec2<T>& x, const T&) const {
        const T q = x.squaredNorm();
        const double R2 = w.R * w.R;
        const T om = w.w0 + w.a * (q / R2 - q * q / (2.0 * R2 * R2));
        return Vec2<T>(-om * x(1), om * x(0));
    }
};

/// v = rot ψ with ψ = A x1 (1 - r^2/R^2)^2; vanishes on the disk boundary.
struct Dipole {
    double A = 1.0;
    double R = 1.0;
    template <class T> Vec2<T> eval(const Vec2<T>& x, const T&) const {
        const T q = x.squaredNorm();
        const double R2 = R * R;
        const T b = 1.0 - q / R2;
        const T g = b * b, g1 = -2.0 * b / R2;
        // v = (-∂2ψ, ∂1ψ)
        return Vec2<T>(-A * 2.0 * x(0) * x(1) * g1, A * (g + 2.0 * x(0) * x(0) * g1));
    }
};

} // namespace flow

class VelocityField {
public:
    using Preset = std::variant<flow::Zero, flow::Azimuthal, flow::Dipole>;

    VelocityField() = default;
    explicit VelocityField(Preset p) : preset_(std::move(p)) {}

    static VelocityField zero() { return VelocityField(flow::Zero{}); }
    static VelocityField rotation(double omega, double R = 1.0) {
        return VelocityField(flow::Azimuthal{AzimuthalProfile{omega, 0.0, R}});
    }
    static VelocityField radial_shear(double w0, double a, double R = 1.0) {
        return VelocityField(flow::Azimuthal{AzimuthalProfile{w0, a, R}});
    }
    static VelocityField dipole(double A, double R = 1.0) { return VelocityField(flow::Dipole{A, R}); }

    template <class T> Vec2<T> eval(const Vec2<T>& x, const T& t) const {
        return std::visit([&](const auto& f) { return f.eval(x, t); }, preset_);
    }

    Vec2d operator()(const Vec2d& x, double t) const { return eval<double>(x, t); }

    /// Value, Jacobian (∂_j v_i) and ∂_t v by forward differentiation.
    VectorDerivs derivs(const Vec2d& x, double t) const {
        return unpack(eval<Jet3>(seed_point(x), seed_time(t)));
    }

    /// Profile when the flow is azimuthal (or zero): enables closed-form transport.
    std::optional<AzimuthalProfile> azimuthal() const {
        if (std::holds_alternative<flow::Zero>(preset_)) return AzimuthalProfile{};
        if (auto* a = std::get_if<flow::Azimuthal>(&preset_)) return a->w;
        return std::nullopt;
    }

    std::string name() const {
        if (std::holds_alternative<flow::Zero>(preset_)) return "zero";
        if (auto* a = std::get_if<flow::Azimuthal>(&preset_)) return a->w.a == 0.0 ? "rotation" : "radial_shear";
        return "dipole";
    }

    const Preset& preset() const { return preset_; }

private:
    Preset preset_ = flow::Zero{};
};

} // namespace calib
