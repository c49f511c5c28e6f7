#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "magbeam/calibration.hpp"
#include "magbeam/equilibrium.hpp"
#include "magbeam/workspace.hpp"

namespace magbeam::cli {

// Comma-separated table with one header row. Empty cells are kept as "".
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row

    std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& source_name = "<csv>");

// Shortest text that parses back to the same double.
std::string format_number(double value);
// Degrees, printed short when that still round-trips to the same radians.
std::string format_angle(double radians);

// theta1_deg,theta2_deg,x_mm,y_mm,z_mm [notch_mm]. An empty z_mm marks a top-view
// record, an empty y_mm a side-view record, an empty theta2_deg means 0.
struct NotchFlags {
    double slope_deg_per_mm = 0.0;
    double offset_mm = 0.0;
};
std::vector<calibration::ExperimentRecord> parse_experiment(const CsvTable& table,
                                                            const std::optional<NotchFlags>& notch = {});
std::string write_experiment(const std::vector<calibration::ExperimentRecord>& records);

// theta1_deg,theta2_deg,x_mm,y_mm,z_mm,converged
std::string write_sweep(const std::vector<equilibrium::SweepPoint>& points);

// theta1_deg,theta2_deg (zipped schedule), returned in radians.
std::pair<std::vector<double>, std::vector<double>> parse_schedule(const CsvTable& table);

// index,x_mm,y_mm (top) or index,x_mm,z_mm (side).
workspace::PlanarTrack parse_track(const CsvTable& table, workspace::ViewPlane plane);
std::string write_track(const workspace::PlanarTrack& track);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace magbeam::cli
