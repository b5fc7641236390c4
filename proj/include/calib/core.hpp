#pragma once

#include <Eigen/Dense>
#include <ceres/jet.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace calib {

template <class T> using Vec2 = Eigen::Matrix<T, 2, 1>;
template <class T> using Mat2 = Eigen::Matrix<T, 2, 2>;
using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;

/// Forward-mode jet with derivative slots (x1, x2, t).
using Jet3 = ceres::Jet<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------- errors

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define CALIB_ERROR(Name)                                                     \
    struct Name : Error {                                                     \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}          \
    }

CALIB_ERROR(OutsideTubularBand);
CALIB_ERROR(AngleViolation);
CALIB_ERROR(AtContactPoint);
CALIB_ERROR(NormalizationUnsafe);
CALIB_ERROR(DegenerateGeometry);
CALIB_ERROR(FixtureInconsistent);
CALIB_ERROR(CalibrationDomainMiss);
CALIB_ERROR(StepFailure);
CALIB_ERROR(TimeSamplingTooCoarse);
CALIB_ERROR(DegenerateFit);
CALIB_ERROR(SceneError);
CALIB_ERROR(IoError);

#undef CALIB_ERROR

// ---------------------------------------------------------------- scalars

inline double value(double a) { return a; }
template <int N> double value(const ceres::Jet<double, N>& a) { return a.a; }

template <class T> Vec2d value(const Vec2<T>& v) { return {value(v(0)), value(v(1))}; }

template <class T> T sqr(const T& a) { return a * a; }

/// Rotation by +90 degrees.
template <class T> Vec2<T> perp(const Vec2<T>& v) { return Vec2<T>(-v(1), v(0)); }
/// Rotation by -90 degrees (right-hand normal of a direction).
template <class T> Vec2<T> rperp(const Vec2<T>& v) { return Vec2<T>(v(1), -v(0)); }

template <class T> T cross(const Vec2<T>& a, const Vec2<T>& b) { return a(0) * b(1) - a(1) * b(0); }

template <class T> T norm(const Vec2<T>& v) {
    using std::sqrt;
    return sqrt(v(0) * v(0) + v(1) * v(1));
}

template <class T> Vec2<T> lift(const Vec2d& v) { return Vec2<T>(T(v(0)), T(v(1))); }

/// Jet-valued point and time seeded with unit derivatives.
inline Vec2<Jet3> seed_point(const Vec2d& p) { return {Jet3(p(0), 0), Jet3(p(1), 1)}; }
inline Jet3 seed_time(double t) { return Jet3(t, 2); }

/// Value, spatial gradient and time derivative of a scalar field.
struct ScalarDerivs {
    double value = 0.0;
    Vec2d grad = Vec2d::Zero();
    double dt = 0.0;
    double advective(const Vec2d& v) const { return dt + grad.dot(v); }
};

/// Value, Jacobian (J(i,j) = d_j f_i) and time derivative of a vector field.
struct VectorDerivs {
    Vec2d value = Vec2d::Zero();
    Mat2d jac = Mat2d::Zero();
    Vec2d dt = Vec2d::Zero();
    double divergence() const { return jac(0, 0) + jac(1, 1); }
    Vec2d advective(const Vec2d& v) const { return dt + jac * v; }
};

inline ScalarDerivs unpack(const Jet3& j) {
    ScalarDerivs d;
    d.value = j.a;
    d.grad = Vec2d(j.v(0), j.v(1));
    d.dt = j.v(2);
    return d;
}

inline VectorDerivs unpack(const Vec2<Jet3>& j) {
    VectorDerivs d;
    for (int i = 0; i < 2; ++i) {
        d.value(i) = j(i).a;
        d.jac(i, 0) = j(i).v(0);
        d.jac(i, 1) = j(i).v(1);
        d.dt(i) = j(i).v(2);
    }
    return d;
}

} // namespace calib
