#pragma once

// Steady-state tip pose by damped fixed-point iteration of
//   p -> beam(tip_wrench(p, n_prev)),
// parameter sweeps over (theta1, theta2), and a numerical inverse q(p).

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "magbeam/beam.hpp"
#include "magbeam/geomag.hpp"

namespace magbeam::equilibrium {

struct SolverSettings {
    double position_tolerance = 1e-6;  // m
    int max_iterations = 1000;
    double relaxation = 0.5;           // lambda in (0, 1]
    // Defaults to the straight configuration when unset.
    std::optional<Vec3> initial_tip;
    // Tangent used for the first wrench evaluation; e1 when unset.
    std::optional<Vec3> initial_tangent;

    void validate() const;
};

struct EquilibriumResult {
    TipPose tip;
    Wrench wrench;
    int iterations = 0;
    double residual = 0.0;  // m, |g(p) - p| at the returned p
    bool converged = false;
};

// Everything the forward model needs apart from the magnet angles.
struct Model {
    beam::RobotParams params;
    geomag::RingPairConfig pair;
    geomag::DipoleSource source;
    geomag::FieldCalibration cal;
    beam::BeamFormulation mode = beam::BeamFormulation::corrected;
};

// One application of the coupled map: wrench at `tip`, then beam response.
TipPose coupled_map(const Model& model, const TipPose& tip);

// |g(p, n) - p| for a given tip state, recomputed from scratch.
double fixed_point_residual(const Model& model, const TipPose& tip);

// Throws DivergenceError when the residual exceeds 10 L or turns non-finite;
// SingularityError propagates from the field model.
EquilibriumResult solve_tip_pose(const Model& model, const SolverSettings& settings = {});

struct SweepPoint {
    double theta1 = 0.0;  // rad
    double theta2 = 0.0;  // rad
    std::optional<EquilibriumResult> result;
    std::string error;  // set when the solve threw
};

enum class SweepPattern { cartesian, zipped };

struct SweepOptions {
    SweepPattern pattern = SweepPattern::cartesian;
    // Parallel mode seeds every point from settings.initial_tip (no warm start).
    bool parallel = false;
    unsigned threads = 0;
};

// Cartesian order is theta1-major. Zipped requires equal-length lists.
std::vector<SweepPoint> sweep(const Model& model, const SolverSettings& settings,
                              const std::vector<double>& theta1_values,
                              const std::vector<double>& theta2_values,
                              const SweepOptions& options = {});

struct InverseTarget {
    Vec3 position;
    std::optional<Vec3> tangent;
    double tangent_weight = 0.0;  // m per unit tangent error
};

struct InverseSettings {
    int grid_size = 24;
    double simplex_tolerance = 1e-3;  // rad
    double initial_simplex_step = 0.1;  // rad
    int max_simplex_iterations = 400;
    int polish_passes = 3;
    std::size_t max_refined_seeds = 8;
    double reachable_margin = 1.05;
    unsigned threads = 0;
};

struct InverseResult {
    double theta1 = 0.0;  // rad in [0, 2pi)
    double theta2 = 0.0;
    EquilibriumResult forward;
    double position_error = 0.0;  // m
    double objective = 0.0;
    bool outside_reachable = false;  // target outside the coarse sweep's bounding ellipse
    std::size_t solution_count = 0;  // distinct basins reaching the tolerance
    std::size_t skipped_samples = 0;
    std::vector<std::string> log;
};

InverseResult invert_controls(const InverseTarget& target, const Model& model,
                              const SolverSettings& settings, const InverseSettings& inverse = {});

}  // namespace magbeam::equilibrium
