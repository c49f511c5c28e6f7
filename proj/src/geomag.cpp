#include "magbeam/geomag.hpp"

#include <cmath>
#include <numbers>

#include "magbeam/errors.hpp"

namespace magbeam::geomag {

void DipoleSource::validate() const {
    require(moment.allFinite() && position.allFinite(), "DipoleSource: non-finite moment or position");
}

RingPairConfig RingPairConfig::make(double moment_magnitude, double theta1, double theta2,
                                    double separation) {
    RingPairConfig pair;
    pair.distal = {moment_magnitude, theta1, 0.0};
    pair.proximal = {moment_magnitude, theta2, -separation};
    pair.separation = separation;
    pair.validate();
    return pair;
}

RingPairConfig RingPairConfig::with_angles(double theta1, double theta2) const {
    RingPairConfig pair = *this;
    pair.distal.angle = theta1;
    pair.proximal.angle = theta2;
    return pair;
}

void RingPairConfig::validate() const {
    require(separation >= 0.0 && std::isfinite(separation), "RingPairConfig: separation must be >= 0");
    require(distal.moment_magnitude >= 0.0 && proximal.moment_magnitude >= 0.0,
            "RingPairConfig: moment magnitudes must be >= 0");
    require(std::isfinite(distal.angle) && std::isfinite(proximal.angle),
            "RingPairConfig: non-finite magnet angle");
    const double gap = distal.axial_offset - proximal.axial_offset;
    require(std::abs(gap - separation) <= 1e-12 * std::max(1.0, separation),
            "RingPairConfig: axial offsets inconsistent with separation");
}

void FieldCalibration::validate() const {
    require(k_b > 0.0 && std::isfinite(k_b), "FieldCalibration: k_b must be > 0");
}

FieldSample dipole_field(const DipoleSource& source, const Vec3& point) {
    const Vec3 P = point - source.position;
    const double r = P.norm();
    if (!(r > 0.0)) {
        throw SingularityError("dipole_field: evaluation point coincides with the source");
    }
    const Vec3 u = P / r;
    const Vec3& m = source.moment;
    const double um = u.dot(m);
    const double r3 = r * r * r;

    FieldSample out;
    out.B = kMu0Over4Pi * (3.0 * um * u - m) / r3;
    // d/dP of (3 u (u·m) - m) / r^3
    //   = 3/r^4 * (u m^T + m u^T + (u·m) I - 5 (u·m) u u^T)
    out.gradient = (3.0 * kMu0Over4Pi / (r3 * r)) *
                   (u * m.transpose() + m * u.transpose() + um * Mat3::Identity() -
                    5.0 * um * u * u.transpose());
    return out;
}

FieldSample calibrated_field(const DipoleSource& source, const FieldCalibration& cal,
                             const Vec3& point) {
    cal.validate();
    const DipoleSource scaled{source.moment, cal.k_b * source.position};
    FieldSample out = dipole_field(scaled, point);
    out.B *= cal.k_b;
    out.gradient *= cal.k_b;
    return out;
}

Mat3 frame_from_tangent(const Vec3& tangent) {
    const Vec3 axis = kE1.cross(tangent);
    const double c = kE1.dot(tangent);
    if (c <= -1.0 + 1e-12) {
        // Antipodal: any half-turn about an axis orthogonal to e1 is minimal.
        return Eigen::AngleAxisd(std::numbers::pi, kE3).toRotationMatrix();
    }
    const Mat3 k = skew(axis);
    return Mat3::Identity() + k + k * k / (1.0 + c);
}

Vec3 ring_dipole_moment(const RingMagnet& magnet, const Vec3& tangent) {
    require(std::abs(tangent.norm() - 1.0) <= 1e-9, "ring_dipole_moment: tangent must have unit norm");
    const Vec3 base_dir(0.0, -std::sin(magnet.angle), std::cos(magnet.angle));
    return magnet.moment_magnitude * (frame_from_tangent(tangent) * base_dir);
}

double magnet_moment_from_geometry(double outer_diameter, double inner_diameter, double length,
                                   double remanence) {
    require(inner_diameter >= 0.0 && outer_diameter > inner_diameter,
            "magnet_moment_from_geometry: need outer_diameter > inner_diameter >= 0");
    require(length > 0.0, "magnet_moment_from_geometry: length must be > 0");
    require(remanence >= 0.0, "magnet_moment_from_geometry: remanence must be >= 0");
    const double ro = 0.5 * outer_diameter;
    const double ri = 0.5 * inner_diameter;
    const double volume = std::numbers::pi * (ro * ro - ri * ri) * length;
    return remanence * volume / kMu0;
}

Wrench tip_wrench(const RingPairConfig& pair, const TipPose& tip, const DipoleSource& source,
                  const FieldCalibration& cal) {
    return tip_wrench_in(pair, tip, FieldModel{source, cal});
}

}  // namespace magbeam::geomag
