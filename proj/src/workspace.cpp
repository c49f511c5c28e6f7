#include "magbeam/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magbeam/errors.hpp"

namespace magbeam::workspace {

void PlanarTrack::validate() const {
    require(points.size() == indices.size(), "PlanarTrack: points and indices differ in length");
    for (std::size_t i = 0; i < points.size(); ++i) {
        require(points[i].allFinite(), "PlanarTrack: non-finite point");
        if (i > 0) require(indices[i] > indices[i - 1], "PlanarTrack: indices must be strictly increasing");
    }
}

std::vector<MergedPoint> merge_biplanar(const PlanarTrack& top, const PlanarTrack& side, double x_tolerance) {
    require(top.plane == ViewPlane::top && side.plane == ViewPlane::side,
            "merge_biplanar: expected a top (x-y) and a side (x-z) track");
    top.validate();
    side.validate();
    require(top.points.size() == side.points.size(), "merge_biplanar: tracks differ in length");
    require(x_tolerance >= 0.0, "merge_biplanar: x_tolerance must be >= 0");

    std::vector<MergedPoint> merged;
    merged.reserve(top.points.size());
    for (std::size_t i = 0; i < top.points.size(); ++i) {
        if (top.indices[i] != side.indices[i]) {
            std::ostringstream msg;
            msg << "merge_biplanar: index mismatch at row " << i << " (" << top.indices[i] << " vs "
                << side.indices[i] << ")";
            throw ContractViolation(msg.str());
        }
        MergedPoint m;
        const double x_top = top.points[i].x();
        const double x_side = side.points[i].x();
        m.position = Vec3(0.5 * (x_top + x_side), top.points[i].y(), side.points[i].y());
        m.x_disagreement = std::abs(x_top - x_side);
        m.flagged = m.x_disagreement > x_tolerance;
        merged.push_back(m);
    }
    return merged;
}

WorkspaceStats workspace_stats(const std::vector<Vec3>& points, const Vec3& straight_tip) {
    require(!points.empty(), "workspace_stats: no points");
    WorkspaceStats s;
    std::vector<double> magnitudes;
    magnitudes.reserve(points.size());
    for (const auto& p : points) {
        const Vec3 d = p - straight_tip;
        s.max_deflection_y = std::max(s.max_deflection_y, std::abs(d.y()));
        s.max_deflection_z = std::max(s.max_deflection_z, std::abs(d.z()));
        magnitudes.push_back(d.norm());
    }
    s.mean_deflection = pairwise_sum(magnitudes) / static_cast<double>(points.size());
    return s;
}

namespace {
double pairwise_range(const double* first, std::size_t count) {
    if (count <= 8) {
        double sum = 0.0;
        for (std::size_t i = 0; i < count; ++i) sum += first[i];
        return sum;
    }
    const std::size_t half = count / 2;
    return pairwise_range(first, half) + pairwise_range(first + half, count - half);
}
}  // namespace

double pairwise_sum(const std::vector<double>& values) { return pairwise_range(values.data(), values.size()); }

}  // namespace magbeam::workspace
