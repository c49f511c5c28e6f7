#include "magbeam/equilibrium.hpp"

#include <cmath>
#include <sstream>

#include "magbeam/errors.hpp"
#include "magbeam/parallel.hpp"

namespace magbeam::equilibrium {

void SolverSettings::validate() const {
    require(position_tolerance > 0.0, "SolverSettings: position_tolerance must be > 0");
    require(max_iterations >= 1, "SolverSettings: max_iterations must be >= 1");
    require(relaxation > 0.0 && relaxation <= 1.0, "SolverSettings: relaxation must be in (0, 1]");
    if (initial_tip) require(initial_tip->allFinite(), "SolverSettings: initial_tip must be finite");
    if (initial_tangent) {
        require(initial_tangent->allFinite() && initial_tangent->norm() > 0.0,
                "SolverSettings: initial_tangent must be a finite nonzero vector");
    }
}

namespace {

struct MapOutput {
    Wrench wrench;
    TipPose next;
};

MapOutput apply_map(const Model& model, const TipPose& tip) {
    MapOutput out;
    out.wrench = geomag::tip_wrench(model.pair, tip, model.source, model.cal);
    out.next = beam::tip_pose_from_wrench(model.params, out.wrench, model.mode);
    return out;
}

}  // namespace

TipPose coupled_map(const Model& model, const TipPose& tip) { return apply_map(model, tip).next; }

double fixed_point_residual(const Model& model, const TipPose& tip) {
    return (coupled_map(model, tip).position - tip.position).norm();
}

EquilibriumResult solve_tip_pose(const Model& model, const SolverSettings& settings) {
    settings.validate();
    model.params.validate();
    model.pair.validate();
    model.source.validate();
    model.cal.validate();

    const double divergence_limit = 10.0 * model.params.length;
    const double lambda = settings.relaxation;

    TipPose state;
    state.position = settings.initial_tip.value_or(model.params.straight_tip());
    state.tangent = settings.initial_tangent.value_or(kE1).normalized();

    EquilibriumResult result;
    for (int k = 1; k <= settings.max_iterations; ++k) {
        const MapOutput out = apply_map(model, state);
        const double residual = (out.next.position - state.position).norm();
        if (!std::isfinite(residual) || !out.next.tangent.allFinite() || residual > divergence_limit) {
            std::ostringstream msg;
            msg << "solve_tip_pose: diverged at iteration " << k << " (residual " << residual << " m)";
            throw DivergenceError(msg.str());
        }
        result.tip = state;
        result.wrench = out.wrench;
        result.iterations = k;
        result.residual = residual;
        if (residual <= settings.position_tolerance) {
            result.converged = true;
            return result;
        }
        state.position = (1.0 - lambda) * state.position + lambda * out.next.position;
        state.tangent = out.next.tangent;
    }

    // Report the residual at the final iterate, not the one before the last update.
    const MapOutput out = apply_map(model, state);
    result.tip = state;
    result.wrench = out.wrench;
    result.residual = (out.next.position - state.position).norm();
    result.converged = result.residual <= settings.position_tolerance;
    return result;
}

std::vector<SweepPoint> sweep(const Model& model, const SolverSettings& settings,
                              const std::vector<double>& theta1_values,
                              const std::vector<double>& theta2_values, const SweepOptions& options) {
    require(!theta1_values.empty() && !theta2_values.empty(), "sweep: angle lists must be nonempty");

    std::vector<SweepPoint> points;
    if (options.pattern == SweepPattern::zipped) {
        require(theta1_values.size() == theta2_values.size(),
                "sweep: zipped pattern needs equal-length angle lists");
        for (std::size_t i = 0; i < theta1_values.size(); ++i) {
            points.push_back({theta1_values[i], theta2_values[i], std::nullopt, {}});
        }
    } else {
        for (double t1 : theta1_values) {
            for (double t2 : theta2_values) points.push_back({t1, t2, std::nullopt, {}});
        }
    }

    auto solve_point = [&](SweepPoint& point, const SolverSettings& seeded) {
        Model local = model;
        local.pair = model.pair.with_angles(point.theta1, point.theta2);
        try {
            point.result = solve_tip_pose(local, seeded);
            point.error.clear();
        } catch (const std::exception& e) {
            point.result.reset();
            point.error = e.what();
        }
    };

    if (options.parallel) {
        parallel_for(points.size(), [&](std::size_t i) { solve_point(points[i], settings); },
                     options.threads);
        return points;
    }

    SolverSettings seeded = settings;
    bool warm = false;
    for (SweepPoint& point : points) {
        solve_point(point, seeded);
        if (warm && !(point.result && point.result->converged)) {
            solve_point(point, settings);
        }
        warm = point.result && point.result->converged;
        if (warm) {
            seeded.initial_tip = point.result->tip.position;
            seeded.initial_tangent = point.result->tip.tangent;
        } else {
            seeded = settings;
        }
    }
    return points;
}

}  // namespace magbeam::equilibrium
