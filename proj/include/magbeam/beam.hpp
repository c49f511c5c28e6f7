#pragma once

// Small-deflection cantilever: tip wrench -> tip position, tangent, centerline.

#include <cstddef>
#include <string_view>
#include <vector>

#include "magbeam/types.hpp"

namespace magbeam::beam {

struct RobotParams {
    double length = 0.15;            // m
    double elastic_modulus = 766e6;  // Pa
    double section_moment = 0.0;     // m^4
    Vec3 base_position = Vec3::Zero();
    double stiffness_scale = 1.0;    // K_E

    // K_E * E * I, the only bending stiffness used anywhere.
    double effective_stiffness() const { return stiffness_scale * elastic_modulus * section_moment; }
    Vec3 straight_tip() const { return base_position + length * kE1; }
    void validate() const;
};

// `corrected` integrates the curvature exactly (force term L^3/3).
// `paper_literal` keeps the L^3/6 force coefficient of the published closed form.
enum class BeamFormulation { corrected, paper_literal };

std::string_view to_string(BeamFormulation mode);
BeamFormulation formulation_from_string(std::string_view name);

TipPose tip_pose_from_wrench(const RobotParams& params, const Wrench& w,
                             BeamFormulation mode = BeamFormulation::corrected);

// Composite-trapezoid integration of curvature -> tangent -> position on a uniform grid.
std::vector<Vec3> centerline(const RobotParams& params, const Wrench& w, std::size_t n_samples);

// pi/64 * (OD^4 - ID^4).
double section_moment_tube(double outer_diameter, double inner_diameter);

}  // namespace magbeam::beam
