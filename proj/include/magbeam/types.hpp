#pragma once

#include <Eigen/Dense>

namespace magbeam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kE1 = Vec3::UnitX();
inline const Vec3 kE2 = Vec3::UnitY();
inline const Vec3 kE3 = Vec3::UnitZ();

// Stacked force/torque acting at the robot tip.
struct Wrench {
    Vec3 force = Vec3::Zero();   // N
    Vec3 torque = Vec3::Zero();  // N·m

    Wrench& operator+=(const Wrench& other) {
        force += other.force;
        torque += other.torque;
        return *this;
    }
    friend Wrench operator+(Wrench a, const Wrench& b) { return a += b; }
    friend Wrench operator*(double s, const Wrench& w) { return {s * w.force, s * w.torque}; }

    bool is_finite() const { return force.allFinite() && torque.allFinite(); }
};

// Tip position and unit tangent.
struct TipPose {
    Vec3 position = Vec3::Zero();  // m
    Vec3 tangent = kE1;
};

// Matrix form of v× so that skew(v) * u == v.cross(u).
inline Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return s;
}

}  // namespace magbeam
