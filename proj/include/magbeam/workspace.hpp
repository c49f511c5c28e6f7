#pragma once

// Reachable-set analysis: bi-planar merge, ellipse fitting, workspace statistics.

#include <cstddef>
#include <vector>

#include "magbeam/types.hpp"

namespace magbeam::workspace {

enum class ViewPlane { top, side };  // top: x-y, side: x-z

struct PlanarTrack {
    ViewPlane plane = ViewPlane::top;
    std::vector<Vec2> points;          // (x, y) for top, (x, z) for side, m
    std::vector<long long> indices;    // strictly increasing

    void validate() const;
};

struct MergedPoint {
    Vec3 position = Vec3::Zero();
    double x_disagreement = 0.0;  // |x_top - x_side|, m
    bool flagged = false;         // disagreement above tolerance
};

// y from the top view, z from the side view, x averaged. Tracks must be index-aligned.
std::vector<MergedPoint> merge_biplanar(const PlanarTrack& top, const PlanarTrack& side,
                                        double x_tolerance = 2e-3);

struct Ellipse {
    Vec2 center = Vec2::Zero();
    double a = 0.0;            // semi-major
    double b = 0.0;            // semi-minor
    double orientation = 0.0;  // rad, direction of the major axis in (-pi/2, pi/2]

    Vec2 point_at(double t) const;
};

struct EllipseFit {
    Ellipse ellipse;
    double rms_distance = 0.0;  // m, geometric
};

// Closest point on the ellipse to `p`. Bisection on the Lagrange multiplier runs to
// machine precision, well inside 1e-9 m for centimetre-scale ellipses.
Vec2 closest_point_on_ellipse(const Ellipse& e, const Vec2& p);
double distance_to_ellipse(const Ellipse& e, const Vec2& p);

// Direct least-squares conic fit constrained to ellipses (4ac - b^2 = 1),
// followed by geometric RMS distance. Throws ContractViolation for fewer than
// six points or degenerate input, and std::domain_error for a non-ellipse conic.
EllipseFit fit_ellipse(const std::vector<Vec2>& points);

struct WorkspaceStats {
    double max_deflection_y = 0.0;  // m
    double max_deflection_z = 0.0;  // m
    double mean_deflection = 0.0;   // m, mean |p - straight|
};

WorkspaceStats workspace_stats(const std::vector<Vec3>& points, const Vec3& straight_tip);

// Pairwise (cascade) summation so reductions do not depend on evaluation order.
double pairwise_sum(const std::vector<double>& values);

}  // namespace magbeam::workspace
