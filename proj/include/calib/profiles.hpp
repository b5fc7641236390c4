#pragma once

// Scalar profiles used by the cutoffs, the interpolation parameter and the weight.

#include "calib/core.hpp"

namespace calib::profile {

/// C^2 quintic ramp on [0,1].
template <class T> T smoothstep5(const T& w) {
    if (value(w) <= 0.0) return T(0.0);
    if (value(w) >= 1.0) return T(1.0);
    return w * w * w * (w * (w * 6.0 - 15.0) + 10.0);
}

/// C^3 septic ramp on [0,1].
template <class T> T smoothstep7(const T& w) {
    if (value(w) <= 0.0) return T(0.0);
    if (value(w) >= 1.0) return T(1.0);
    const T w4 = w * w * w * w;
    return w4 * (w * (w * (w * -20.0 + 70.0) - 84.0) + 35.0);
}

/// Bump θ: 1 on |r| <= 1/2, 0 on |r| >= 1.
template <class T> T theta(const T& r) {
    using std::abs;
    const T a = abs(r);
    return 1.0 - smoothstep7((a - 0.5) * 2.0);
}

/// Quadratic profile ζ(r) = (1 - r^2) θ(r^2).
template <class T> T zeta(const T& r) {
    const T q = r * r;
    if (value(q) >= 1.0) return T(0.0);
    return (1.0 - q) * theta(q);
}

/// Base interpolation profile: 1 on (-inf, 1/3], 0 on [2/3, inf).
template <class T> T lambda_tilde(const T& z) { return 1.0 - smoothstep5(z * 3.0 - 1.0); }

/// Rescaled interpolation profile in the cosine variable u.
template <class T> T lambda_of_u(const T& u) {
    static const double denom = 1.0 - std::cos(kPi / 6.0);
    return lambda_tilde((1.0 - u) / denom);
}

/// Smooth truncation of the identity: r on [-1/2,1/2], sign(r) beyond |r| >= 1.
template <class T> T theta_bar(const T& r) {
    if (value(r) < 0.0) return -theta_bar(T(-r));
    if (value(r) <= 0.5) return r;
    if (value(r) >= 1.0) return T(1.0);
    const T w = r * 2.0 - 1.0;
    const T g = w + w * w * w * (5.0 + w * (-10.0 + w * (6.0 - w)));
    return 0.5 + 0.5 * g;
}

} // namespace calib::profile
