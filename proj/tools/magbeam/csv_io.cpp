#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "config.hpp"

namespace magbeam::cli {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

[[noreturn]] void row_error(const CsvTable& t, std::size_t row, const std::string& what) {
    throw InputError("csv line " + std::to_string(t.line_numbers[row]) + ": " + what);
}

std::optional<double> cell_number(const CsvTable& t, std::size_t row, std::optional<std::size_t> col) {
    if (!col) return std::nullopt;
    const std::string& text = t.rows[row][*col];
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        row_error(t, row, "'" + text + "' in column " + t.header[*col] + " is not a finite number");
    }
    return value;
}

double required_number(const CsvTable& t, std::size_t row, std::optional<std::size_t> col) {
    const auto v = cell_number(t, row, col);
    if (!v) row_error(t, row, "missing value in column " + t.header[*col]);
    return *v;
}

void require_columns(const CsvTable& t, const std::vector<std::string>& allowed,
                     const std::vector<std::string>& required) {
    for (const auto& name : t.header) {
        bool known = false;
        for (const auto& a : allowed) known = known || a == name;
        if (!known) throw InputError("csv: unexpected column '" + name + "'");
    }
    for (const auto& name : required) {
        if (!t.column(name)) throw InputError("csv: missing column '" + name + "'");
    }
    if (t.rows.empty()) throw InputError("csv: no data rows");
}

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

CsvTable parse_csv(const std::string& text, const std::string& source_name) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw InputError(source_name + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(line_no);
    }
    if (t.header.empty()) throw InputError(source_name + ": empty file");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_angle(double radians) {
    const double degrees = radians / kDeg;
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), degrees, std::chars_format::general, 15);
    std::string text(buf, ptr);
    // Keep the short form only when it maps back to the same radian value.
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    return back * kDeg == radians ? text : format_number(degrees);
}

std::vector<calibration::ExperimentRecord> parse_experiment(const CsvTable& t, const std::optional<NotchFlags>& notch) {
    const std::vector<std::string> allowed{"theta1_deg", "theta2_deg", "x_mm", "y_mm", "z_mm", "notch_mm"};
    if (notch) {
        require_columns(t, allowed, {"notch_mm", "x_mm"});
    } else {
        require_columns(t, allowed, {"theta1_deg", "x_mm"});
    }
    const auto c_t1 = t.column("theta1_deg");
    const auto c_t2 = t.column("theta2_deg");
    const auto c_x = t.column("x_mm");
    const auto c_y = t.column("y_mm");
    const auto c_z = t.column("z_mm");
    const auto c_notch = t.column("notch_mm");

    std::vector<calibration::ExperimentRecord> records;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        calibration::ExperimentRecord rec;
        if (notch) {
            const calibration::NotchTransform transform{notch->slope_deg_per_mm * kDeg / 1e-3,
                                                        notch->offset_mm * 1e-3};
            rec.theta1 = calibration::notch_to_angle(required_number(t, r, c_notch) * 1e-3, transform);
        } else {
            rec.theta1 = required_number(t, r, c_t1) * kDeg;
        }
        rec.theta2 = cell_number(t, r, c_t2).value_or(0.0) * kDeg;
        const double x = required_number(t, r, c_x);
        const auto y = cell_number(t, r, c_y);
        const auto z = cell_number(t, r, c_z);
        if (y && z) {
            rec.plane = calibration::MeasurementPlane::full;
        } else if (y) {
            rec.plane = calibration::MeasurementPlane::top;
        } else if (z) {
            rec.plane = calibration::MeasurementPlane::side;
        } else {
            row_error(t, r, "needs at least two of x_mm, y_mm, z_mm");
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.tip = Vec3(x, y.value_or(nan), z.value_or(nan)) * 1e-3;
        records.push_back(rec);
    }
    return records;
}

std::string write_experiment(const std::vector<calibration::ExperimentRecord>& records) {
    std::ostringstream out;
    out << "theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n";
    for (const auto& r : records) {
        const bool has_y = r.plane != calibration::MeasurementPlane::side;
        const bool has_z = r.plane != calibration::MeasurementPlane::top;
        out << format_angle(r.theta1) << ',' << format_angle(r.theta2) << ','
            << format_number(r.tip.x() * 1e3) << ',' << (has_y ? format_number(r.tip.y() * 1e3) : "") << ','
            << (has_z ? format_number(r.tip.z() * 1e3) : "") << '\n';
    }
    return out.str();
}

std::string write_sweep(const std::vector<equilibrium::SweepPoint>& points) {
    std::ostringstream out;
    out << "theta1_deg,theta2_deg,x_mm,y_mm,z_mm,converged\n";
    for (const auto& p : points) {
        out << format_angle(p.theta1) << ',' << format_angle(p.theta2) << ',';
        if (p.result) {
            const Vec3 mm = p.result->tip.position * 1e3;
            out << format_number(mm.x()) << ',' << format_number(mm.y()) << ',' << format_number(mm.z()) << ','
                << (p.result->converged ? 1 : 0) << '\n';
        } else {
            out << ",,,0\n";
        }
    }
    return out.str();
}

std::pair<std::vector<double>, std::vector<double>> parse_schedule(const CsvTable& t) {
    require_columns(t, {"theta1_deg", "theta2_deg"}, {"theta1_deg", "theta2_deg"});
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out.first.push_back(required_number(t, r, t.column("theta1_deg")) * kDeg);
        out.second.push_back(required_number(t, r, t.column("theta2_deg")) * kDeg);
    }
    return out;
}

workspace::PlanarTrack parse_track(const CsvTable& t, workspace::ViewPlane plane) {
    const std::string second = plane == workspace::ViewPlane::top ? "y_mm" : "z_mm";
    require_columns(t, {"index", "x_mm", second}, {"index", "x_mm", second});
    workspace::PlanarTrack track;
    track.plane = plane;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double index = required_number(t, r, t.column("index"));
        if (index != std::floor(index)) row_error(t, r, "index must be an integer");
        track.indices.push_back(static_cast<long long>(index));
        track.points.emplace_back(required_number(t, r, t.column("x_mm")) * 1e-3,
                                  required_number(t, r, t.column(second)) * 1e-3);
    }
    return track;
}

std::string write_track(const workspace::PlanarTrack& track) {
    std::ostringstream out;
    out << "index,x_mm," << (track.plane == workspace::ViewPlane::top ? "y_mm" : "z_mm") << '\n';
    for (std::size_t i = 0; i < track.points.size(); ++i) {
        out << track.indices[i] << ',' << format_number(track.points[i].x() * 1e3) << ','
            << format_number(track.points[i].y() * 1e3) << '\n';
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace magbeam::cli
