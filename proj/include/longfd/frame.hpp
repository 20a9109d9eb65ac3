#pragma once

// Planar frame utilities shared across the library: the inertial basis
// (e1 along gravity, e2 horizontal), rotation matrices, the +90-degree
// rotation S, and the single angle-wrapping convention used everywhere.

#include <Eigen/Dense>
#include <cmath>

namespace longfd {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Canonicalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

// Inertial basis: e1 points along gravity, e2 is horizontal.
inline Vec2 e1() { return Vec2(1.0, 0.0); }
inline Vec2 e2() { return Vec2(0.0, 1.0); }

// Rotation by theta (counterclockwise).
inline Mat2 rot(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

// S = rot(pi/2): maps a vector to its +90-degree rotation.
inline Mat2 skew90() {
    Mat2 s;
    s << 0.0, -1.0, 1.0, 0.0;
    return s;
}

}  // namespace longfd
