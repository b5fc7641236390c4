#pragma once

// Bulk extension ξ^i = n_I ∘ P_{T_i} of the interface normal on its tubular band.

#include "calib/geometry.hpp"

namespace calib {

template <class T> Vec2<T> xi_bulk(const Scene& sc, int i, const Vec2<T>& p, const T& t, double band = 2.0) {
    return interface_chart<T>(sc, i, p, t, band).n;
}

inline Vec2d xi_bulk(const Scene& sc, int i, const Vec2d& p, double t, double band = 2.0) {
    return xi_bulk<double>(sc, i, p, t, band);
}

/// ξ^i with Jacobian and time derivative.
inline VectorDerivs xi_bulk_derivs(const Scene& sc, int i, const Vec2d& p, double t, double band = 2.0) {
    return unpack(xi_bulk<Jet3>(sc, i, seed_point(p), seed_time(t), band));
}

/// H_I at the nearest point, constant along normals.
inline double interface_curvature_at(const Scene& sc, int i, const Vec2d& p, double t, double band = 2.0) {
    return interface_chart(sc, i, p, t, band).H;
}

/// Central-difference Jacobian and time derivative of a vector field.
template <class F> VectorDerivs central_differences(F&& f, const Vec2d& p, double t, double h) {
    VectorDerivs d;
    d.value = f(p, t);
    for (int j = 0; j < 2; ++j) {
        Vec2d e = Vec2d::Zero();
        e(j) = h;
        d.jac.col(j) = (f(Vec2d(p + e), t) - f(Vec2d(p - e), t)) / (2.0 * h);
    }
    d.dt = (f(p, t + h) - f(p, t - h)) / (2.0 * h);
    return d;
}

/// Residual of the transport equation ∂_t ξ + (v·∇)ξ + (Id - ξ⊗ξ)(∇v)ᵀξ.
inline Vec2d transport_residual(const VectorDerivs& xi, const VectorDerivs& v) {
    const Vec2d x = xi.value;
    const Vec2d gvT = v.jac.transpose() * x;
    return xi.dt + xi.jac * v.value + gvT - x * x.dot(gvT);
}

/// ∂_t|ξ|² + (v·∇)|ξ|².
inline double length_evolution(const VectorDerivs& xi, const VectorDerivs& v) {
    return 2.0 * xi.value.dot(xi.dt + xi.jac * v.value);
}

} // namespace calib
