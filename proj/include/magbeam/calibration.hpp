#pragma once

// Minimax (K_E, K_B) calibration against tracked tip positions, and fit metrics.

#include <cstddef>
#include <optional>
#include <vector>

#include "magbeam/equilibrium.hpp"

namespace magbeam::calibration {

// Which camera plane a record was measured in. `full` carries all three components.
enum class MeasurementPlane { top, side, full };

struct ExperimentRecord {
    double theta1 = 0.0;  // rad, measured
    double theta2 = 0.0;  // rad, measured
    Vec3 tip = Vec3::Zero();  // m; the component outside `plane` is ignored
    MeasurementPlane plane = MeasurementPlane::full;

    // Components compared against a prediction (x,y for top; x,z for side).
    std::vector<int> observed_axes() const;
    void validate() const;
};

// In-plane Euclidean distance between the record and a predicted tip.
double in_plane_error(const ExperimentRecord& record, const Vec3& predicted);

struct FitMetrics {
    double max_abs_error = 0.0;   // m
    double mean_abs_error = 0.0;  // m
    double std_error = 0.0;       // m, population
    double r_squared = 1.0;
};

// R^2 is 1 - SS_res / SS_tot over the stacked in-plane deflection components
// (tip minus `straight_tip`), SS_tot about each component's mean.
FitMetrics evaluate_metrics(const std::vector<ExperimentRecord>& records,
                            const std::vector<TipPose>& predictions, const Vec3& straight_tip);

struct CalibrationGrid {
    std::vector<double> ke_values;
    std::vector<double> kb_values;

    // lo + i (hi - lo) / (n - 1); n == 1 yields {lo}.
    static std::vector<double> linspace(double lo, double hi, std::size_t n);
    static CalibrationGrid default_ranges(std::size_t n_ke = 25, std::size_t n_kb = 25);
    void validate() const;
};

struct CalibrationResult {
    double ke_star = 0.0;
    double kb_star = 0.0;
    std::size_t ke_index = 0;
    std::size_t kb_index = 0;
    // error_surface[i][j] at (ke_values[i], kb_values[j]); +inf where any solve failed.
    std::vector<std::vector<double>> error_surface;
    FitMetrics metrics_at_optimum;
    std::vector<TipPose> predictions_at_optimum;
};

// Forward predictions for each record's measured angles. Returns nullopt when any
// solve throws or fails to converge.
std::optional<std::vector<TipPose>> predict(const equilibrium::Model& model,
                                            const equilibrium::SolverSettings& settings,
                                            const std::vector<ExperimentRecord>& records);

// Max in-plane error of `model` over `records` (+inf on any failed solve).
double max_abs_error(const equilibrium::Model& model, const equilibrium::SolverSettings& settings,
                     const std::vector<ExperimentRecord>& records);

// `model` supplies everything except K_E (params.stiffness_scale) and K_B (cal.k_b).
// Ties are broken toward the lexicographically smallest (ke, kb).
CalibrationResult grid_search_calibrate(const std::vector<ExperimentRecord>& records,
                                        const equilibrium::Model& model, const CalibrationGrid& grid,
                                        const equilibrium::SolverSettings& settings,
                                        unsigned threads = 0);

// Linear notch-position to rotation map.
struct NotchTransform {
    double slope = 0.0;   // rad/m
    double offset = 0.0;  // m
};

inline double notch_to_angle(double notch_position, const NotchTransform& transform) {
    return transform.slope * (notch_position - transform.offset);
}

}  // namespace magbeam::calibration
