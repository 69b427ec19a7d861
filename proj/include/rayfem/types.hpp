#pragma once

#include <complex>
#include <cmath>
#include <functional>

namespace rayfem {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    Vec2() = default;
    Vec2(double x_, double z_) : x(x_), z(z_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
    Vec2 operator*(double s) const { return {x * s, z * s}; }
    double dot(const Vec2& o) const { return x * o.x + z * o.z; }
    double norm() const { return std::hypot(x, z); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, z / n};
    }
    double angle() const {
        double a = std::atan2(z, x);
        if (a < 0.0) a += 2.0 * kPi;
        return a;
    }
    static Vec2 fromAngle(double theta) { return {std::cos(theta), std::sin(theta)}; }
};

// Complex-valued gradient (d/dx, d/dz) of a scalar field.
struct GradC {
    cplx dx{0.0, 0.0};
    cplx dz{0.0, 0.0};
};

using WaveSpeedFn = std::function<double(double, double)>;
using SourceFn = std::function<cplx(double, double)>;
using BoundaryFn = std::function<cplx(double, double)>;

// Wraps an angular difference into (-pi, pi].
inline double wrapAngle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a > kPi) a -= 2.0 * kPi;
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace rayfem
