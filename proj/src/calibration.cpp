#include "magbeam/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magbeam/errors.hpp"
#include "magbeam/parallel.hpp"

namespace magbeam::calibration {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<int> ExperimentRecord::observed_axes() const {
    switch (plane) {
        case MeasurementPlane::top: return {0, 1};
        case MeasurementPlane::side: return {0, 2};
        case MeasurementPlane::full: break;
    }
    return {0, 1, 2};
}

void ExperimentRecord::validate() const {
    require(std::isfinite(theta1) && std::isfinite(theta2), "ExperimentRecord: non-finite angle");
    for (int axis : observed_axes()) {
        require(std::isfinite(tip[axis]), "ExperimentRecord: observed tip component is not finite");
    }
}

double in_plane_error(const ExperimentRecord& record, const Vec3& predicted) {
    double sum = 0.0;
    for (int axis : record.observed_axes()) {
        const double d = predicted[axis] - record.tip[axis];
        sum += d * d;
    }
    return std::sqrt(sum);
}

FitMetrics evaluate_metrics(const std::vector<ExperimentRecord>& records,
                            const std::vector<TipPose>& predictions, const Vec3& straight_tip) {
    require(records.size() == predictions.size(), "evaluate_metrics: records and predictions differ in length");
    require(records.size() >= 2, "evaluate_metrics: need at least 2 records");

    const auto n = static_cast<double>(records.size());
    FitMetrics m;
    std::vector<double> errors;
    errors.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].validate();
        errors.push_back(in_plane_error(records[i], predictions[i].position));
    }
    m.max_abs_error = *std::max_element(errors.begin(), errors.end());
    double sum = 0.0;
    for (double e : errors) sum += e;
    m.mean_abs_error = sum / n;
    double var = 0.0;
    for (double e : errors) var += (e - m.mean_abs_error) * (e - m.mean_abs_error);
    m.std_error = std::sqrt(var / n);

    // Per-axis means over the records observing that axis.
    Vec3 mean = Vec3::Zero();
    Eigen::Vector3i count = Eigen::Vector3i::Zero();
    for (const auto& r : records) {
        for (int axis : r.observed_axes()) {
            mean[axis] += r.tip[axis] - straight_tip[axis];
            ++count[axis];
        }
    }
    for (int axis = 0; axis < 3; ++axis) {
        if (count[axis] > 0) mean[axis] /= count[axis];
    }
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (int axis : records[i].observed_axes()) {
            const double measured = records[i].tip[axis] - straight_tip[axis];
            const double predicted = predictions[i].position[axis] - straight_tip[axis];
            ss_res += (measured - predicted) * (measured - predicted);
            ss_tot += (measured - mean[axis]) * (measured - mean[axis]);
        }
    }
    if (ss_res == 0.0) {
        m.r_squared = 1.0;
    } else if (ss_tot == 0.0) {
        m.r_squared = std::numeric_limits<double>::quiet_NaN();
    } else {
        m.r_squared = 1.0 - ss_res / ss_tot;
    }
    return m;
}

std::vector<double> CalibrationGrid::linspace(double lo, double hi, std::size_t n) {
    require(n >= 1, "CalibrationGrid::linspace: need at least one value");
    if (n == 1) return {lo};
    std::vector<double> v(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    v.back() = hi;
    return v;
}

CalibrationGrid CalibrationGrid::default_ranges(std::size_t n_ke, std::size_t n_kb) {
    return {linspace(0.009, 0.018, n_ke), linspace(3.5, 4.5, n_kb)};
}

void CalibrationGrid::validate() const {
    auto check = [](const std::vector<double>& v, const char* name) {
        require(!v.empty(), std::string("CalibrationGrid: ") + name + " is empty");
        for (std::size_t i = 0; i < v.size(); ++i) {
            require(std::isfinite(v[i]) && v[i] > 0.0, std::string("CalibrationGrid: ") + name + " must be positive");
            if (i > 0) require(v[i] > v[i - 1], std::string("CalibrationGrid: ") + name + " must be strictly increasing");
        }
    };
    check(ke_values, "ke_values");
    check(kb_values, "kb_values");
}

std::optional<std::vector<TipPose>> predict(const equilibrium::Model& model,
                                            const equilibrium::SolverSettings& settings,
                                            const std::vector<ExperimentRecord>& records) {
    std::vector<TipPose> out;
    out.reserve(records.size());
    for (const auto& record : records) {
        equilibrium::Model local = model;
        local.pair = model.pair.with_angles(record.theta1, record.theta2);
        try {
            const auto result = equilibrium::solve_tip_pose(local, settings);
            if (!result.converged) return std::nullopt;
            out.push_back(result.tip);
        } catch (const DivergenceError&) {
            return std::nullopt;
        } catch (const SingularityError&) {
            return std::nullopt;
        }
    }
    return out;
}

double max_abs_error(const equilibrium::Model& model, const equilibrium::SolverSettings& settings,
                     const std::vector<ExperimentRecord>& records) {
    const auto predictions = predict(model, settings, records);
    if (!predictions) return kInf;
    double worst = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        worst = std::max(worst, in_plane_error(records[i], (*predictions)[i].position));
    }
    return worst;
}

CalibrationResult grid_search_calibrate(const std::vector<ExperimentRecord>& records,
                                        const equilibrium::Model& model, const CalibrationGrid& grid,
                                        const equilibrium::SolverSettings& settings, unsigned threads) {
    require(!records.empty(), "grid_search_calibrate: no records");
    for (const auto& r : records) r.validate();
    grid.validate();
    settings.validate();

    const std::size_t n_ke = grid.ke_values.size();
    const std::size_t n_kb = grid.kb_values.size();
    CalibrationResult result;
    result.error_surface.assign(n_ke, std::vector<double>(n_kb, kInf));

    parallel_for(n_ke * n_kb, [&](std::size_t k) {
        const std::size_t i = k / n_kb;
        const std::size_t j = k % n_kb;
        equilibrium::Model cell = model;
        cell.params.stiffness_scale = grid.ke_values[i];
        cell.cal.k_b = grid.kb_values[j];
        result.error_surface[i][j] = max_abs_error(cell, settings, records);
    }, threads);

    // Row-major scan with strict '<' keeps the lexicographically smallest (ke, kb) on ties.
    double best = kInf;
    bool found = false;
    for (std::size_t i = 0; i < n_ke; ++i) {
        for (std::size_t j = 0; j < n_kb; ++j) {
            if (result.error_surface[i][j] < best) {
                best = result.error_surface[i][j];
                result.ke_index = i;
                result.kb_index = j;
                found = true;
            }
        }
    }
    if (!found) throw CalibrationError("grid_search_calibrate: forward model failed in every grid cell");

    result.ke_star = grid.ke_values[result.ke_index];
    result.kb_star = grid.kb_values[result.kb_index];

    equilibrium::Model optimum = model;
    optimum.params.stiffness_scale = result.ke_star;
    optimum.cal.k_b = result.kb_star;
    result.predictions_at_optimum = *predict(optimum, settings, records);
    if (records.size() >= 2) {
        result.metrics_at_optimum =
            evaluate_metrics(records, result.predictions_at_optimum, optimum.params.straight_tip());
    } else {
        const double e = in_plane_error(records.front(), result.predictions_at_optimum.front().position);
        result.metrics_at_optimum = {e, e, 0.0, std::numeric_limits<double>::quiet_NaN()};
    }
    return result;
}

}  // namespace magbeam::calibration
