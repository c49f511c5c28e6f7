#include "magbeam/beam.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "magbeam/errors.hpp"

namespace magbeam::beam {

void RobotParams::validate() const {
    require(length > 0.0 && std::isfinite(length), "RobotParams: length must be > 0");
    require(elastic_modulus > 0.0 && std::isfinite(elastic_modulus),
            "RobotParams: elastic_modulus must be > 0");
    require(section_moment > 0.0 && std::isfinite(section_moment),
            "RobotParams: section_moment must be > 0");
    require(stiffness_scale > 0.0 && std::isfinite(stiffness_scale),
            "RobotParams: stiffness_scale must be > 0");
    require(base_position.allFinite(), "RobotParams: base_position must be finite");
}

std::string_view to_string(BeamFormulation mode) {
    return mode == BeamFormulation::corrected ? "corrected" : "paper_literal";
}

BeamFormulation formulation_from_string(std::string_view name) {
    if (name == "corrected") return BeamFormulation::corrected;
    if (name == "paper_literal") return BeamFormulation::paper_literal;
    throw ContractViolation("unknown beam formulation '" + std::string(name) + "'");
}

TipPose tip_pose_from_wrench(const RobotParams& params, const Wrench& w, BeamFormulation mode) {
    params.validate();
    require(w.is_finite(), "tip_pose_from_wrench: wrench must be finite");
    const double L = params.length;
    const double EI = params.effective_stiffness();
    const double force_coeff = (mode == BeamFormulation::corrected) ? L * L * L / 3.0 : L * L * L / 6.0;

    // (e1 x f) x e1 is the component of f orthogonal to the beam axis.
    const Vec3 lateral_force = kE1.cross(w.force).cross(kE1);

    TipPose pose;
    pose.position = params.straight_tip() +
                    (0.5 * L * L * w.torque.cross(kE1) + force_coeff * lateral_force) / EI;
    const Vec3 n = kE1 + (L / EI) * (w.torque + 0.5 * L * kE1.cross(w.force)).cross(kE1);
    pose.tangent = n.normalized();
    return pose;
}

std::vector<Vec3> centerline(const RobotParams& params, const Wrench& w, std::size_t n_samples) {
    params.validate();
    require(n_samples >= 2, "centerline: n_samples must be >= 2");
    const double L = params.length;
    const double EI = params.effective_stiffness();
    const double h = L / static_cast<double>(n_samples - 1);
    const Vec3 e1_cross_f = kE1.cross(w.force);

    auto curvature_cross_e1 = [&](double s) -> Vec3 {
        return ((w.torque + (L - s) * e1_cross_f) / EI).cross(kE1);
    };

    std::vector<Vec3> points(n_samples);
    points[0] = params.base_position;
    Vec3 tangent = kE1;
    Vec3 k_prev = curvature_cross_e1(0.0);
    for (std::size_t i = 1; i < n_samples; ++i) {
        const double s = h * static_cast<double>(i);
        const Vec3 k_next = curvature_cross_e1(s);
        const Vec3 next_tangent = tangent + 0.5 * h * (k_prev + k_next);
        points[i] = points[i - 1] + 0.5 * h * (tangent + next_tangent);
        tangent = next_tangent;
        k_prev = k_next;
    }
    return points;
}

double section_moment_tube(double outer_diameter, double inner_diameter) {
    require(inner_diameter >= 0.0 && outer_diameter > inner_diameter,
            "section_moment_tube: need outer_diameter > inner_diameter >= 0");
    const double od2 = outer_diameter * outer_diameter;
    const double id2 = inner_diameter * inner_diameter;
    return std::numbers::pi / 64.0 * (od2 * od2 - id2 * id2);
}

}  // namespace magbeam::beam
