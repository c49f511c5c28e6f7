#pragma once

// Point-dipole field model and the magnetic wrench on the rotatable
// ring-magnet pair at the robot tip.

#include <numbers>

#include "magbeam/types.hpp"

namespace magbeam::geomag {

inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;  // T·m/A
inline constexpr double kMu0Over4Pi = 1.0e-7;

// Nominal remanence of sintered N52 grade material.
inline constexpr double kRemanenceN52 = 1.45;  // T

// External permanent magnet approximated as a point dipole.
struct DipoleSource {
    Vec3 moment = Vec3::Zero();    // A·m²
    Vec3 position = Vec3::Zero();  // m

    void validate() const;
};

// Diametrically magnetized ring. `angle` is kept unwrapped.
struct RingMagnet {
    double moment_magnitude = 0.0;  // A·m²
    double angle = 0.0;             // rad, rotation about the tip tangent
    double axial_offset = 0.0;      // m, signed, along the tangent from the tip point
};

// Magnet 1 is distal (at the tip point), magnet 2 sits `separation` behind it.
struct RingPairConfig {
    RingMagnet distal;
    RingMagnet proximal;
    double separation = 0.0;  // m

    // Builds a consistent pair: offsets 0 and -separation.
    static RingPairConfig make(double moment_magnitude, double theta1, double theta2,
                               double separation = 0.0);

    RingPairConfig with_angles(double theta1, double theta2) const;
    void validate() const;
};

// B and its Jacobian, gradient(i, j) = dB_i / dp_j.
struct FieldSample {
    Vec3 B = Vec3::Zero();
    Mat3 gradient = Mat3::Zero();
};

// Scales both the source moment and its position (K_B).
struct FieldCalibration {
    double k_b = 1.0;

    void validate() const;
};

// B(p) = mu0/4pi * (3 u (u·m) - m) / |P|^3 with P = p - p_e and u = P/|P|.
// Throws SingularityError when p coincides with the source.
FieldSample dipole_field(const DipoleSource& source, const Vec3& point);

// K_B * dipole_field(m_e, K_B * p_e; point). Gradient is with respect to `point`.
FieldSample calibrated_field(const DipoleSource& source, const FieldCalibration& cal,
                             const Vec3& point);

// Rotates e3 by `angle` about e1, then applies the minimal rotation taking e1 onto
// `tangent`. The result is orthogonal to `tangent`.
Vec3 ring_dipole_moment(const RingMagnet& magnet, const Vec3& tangent);

// Minimal (geodesic) rotation mapping e1 onto the unit vector `tangent`.
Mat3 frame_from_tangent(const Vec3& tangent);

// Br * V / mu0 for an annular cylinder (inner_diameter = 0 for a solid one).
double magnet_moment_from_geometry(double outer_diameter, double inner_diameter, double length,
                                   double remanence);

// Field evaluator used by the wrench computation. The default is calibrated_field.
struct FieldModel {
    DipoleSource source;
    FieldCalibration cal;

    FieldSample operator()(const Vec3& point) const { return calibrated_field(source, cal, point); }
};

// f = sum_i G(p_i)^T m_i,  tau = sum_i m_i x B(p_i) + delta * n x f.
// Magnet positions: p_1 = p + offset_1 n, p_2 = p + offset_2 n.
Wrench tip_wrench(const RingPairConfig& pair, const TipPose& tip, const DipoleSource& source,
                  const FieldCalibration& cal);

// Same as above with an arbitrary field evaluator (used for uniform-field stubs in tests).
template <typename Field>
Wrench tip_wrench_in(const RingPairConfig& pair, const TipPose& tip, const Field& field);

}  // namespace magbeam::geomag

#include "magbeam/detail/geomag_impl.hpp"
