#include "app.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "csv_io.hpp"
#include "magbeam/calibration.hpp"
#include "magbeam/errors.hpp"
#include "magbeam/workspace.hpp"
#include "svg.hpp"

namespace magbeam::cli {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const char* const kRSquaredDefinition =
    "1 - SS_res/SS_tot over stacked in-plane deflection components (tip minus straight tip), "
    "SS_tot about per-component means";

double parse_double(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InputError(what + ": '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) throw InputError(what + ": '" + text + "' is not a number");
    return v;
}

std::vector<std::string> split_colon(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (!text.empty() && text.back() == ':') parts.emplace_back();
    return parts;
}

json vec_mm(const Vec3& v) {
    json a = json::array();
    for (int i = 0; i < 3; ++i) a.push_back(v[i] * 1e3);
    return a;
}

json metrics_json(const calibration::FitMetrics& m) {
    return {{"max_abs_error_mm", m.max_abs_error * 1e3},
            {"mean_abs_error_mm", m.mean_abs_error * 1e3},
            {"std_error_mm", m.std_error * 1e3},
            {"r_squared", m.r_squared},
            {"r_squared_definition", kRSquaredDefinition}};
}

json equilibrium_json(const equilibrium::EquilibriumResult& r, const Vec3& straight) {
    return {{"tip_mm", vec_mm(r.tip.position)},
            {"tangent", {r.tip.tangent.x(), r.tip.tangent.y(), r.tip.tangent.z()}},
            {"deflection_mm", (r.tip.position - straight).norm() * 1e3},
            {"force_n", {r.wrench.force.x(), r.wrench.force.y(), r.wrench.force.z()}},
            {"torque_nm", {r.wrench.torque.x(), r.wrench.torque.y(), r.wrench.torque.z()}},
            {"iterations", r.iterations},
            {"residual_mm", r.residual * 1e3},
            {"converged", r.converged}};
}

const char* plane_name(calibration::MeasurementPlane p) {
    switch (p) {
        case calibration::MeasurementPlane::top: return "top";
        case calibration::MeasurementPlane::side: return "side";
        case calibration::MeasurementPlane::full: break;
    }
    return "full";
}

// Options shared by every model-driven subcommand.
struct ModelOptions {
    std::string config_path;
    std::optional<double> ke;
    std::optional<double> kb;
    std::string beam_mode;

    void attach(CLI::App* cmd, bool with_overrides) {
        cmd->add_option("--config", config_path, "Robot configuration JSON")->required();
        if (with_overrides) {
            cmd->add_option("--ke", ke, "Override the stiffness scale K_E")->check(CLI::PositiveNumber);
            cmd->add_option("--kb", kb, "Override the field calibration K_B")->check(CLI::PositiveNumber);
        }
        cmd->add_option("--beam-mode", beam_mode, "corrected | paper_literal (overrides the config)")
            ->check(CLI::IsMember({"corrected", "paper_literal"}));
    }

    RobotConfig load() const {
        RobotConfig cfg = load_config(config_path);
        if (ke) cfg.model.params.stiffness_scale = *ke;
        if (kb) cfg.model.cal.k_b = *kb;
        if (!beam_mode.empty()) cfg.model.mode = beam::formulation_from_string(beam_mode);
        return cfg;
    }
};

class Report {
public:
    Report(std::string command, const RobotConfig& cfg, const std::string& config_path)
        : start_(std::chrono::steady_clock::now()) {
        doc_["software"] = {{"name", "magbeam"}, {"version", kVersion}};
        doc_["command"] = std::move(command);
        doc_["inputs"] = {{"config_file", config_path},
                          {"config", cfg.document},
                          {"effective", {{"ke", cfg.model.params.stiffness_scale},
                                         {"kb", cfg.model.cal.k_b},
                                         {"beam_mode", std::string(beam::to_string(cfg.model.mode))}}},
                          {"arguments", json::object()}};
    }
    json& arguments() { return doc_["inputs"]["arguments"]; }
    json& operator[](const char* key) { return doc_[key]; }

    std::string finish() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        doc_["wall_time_s"] = std::chrono::duration<double>(elapsed).count();
        return doc_.dump(2) + "\n";
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

int cmd_simulate(const ModelOptions& mo, double theta1_deg, double theta2_deg, const std::string& out_path,
                 std::ostream& out) {
    RobotConfig cfg = mo.load();
    Report report("simulate", cfg, mo.config_path);
    report.arguments() = {{"theta1_deg", theta1_deg}, {"theta2_deg", theta2_deg}};

    equilibrium::Model model = cfg.model;
    model.pair = model.pair.with_angles(theta1_deg * kDeg, theta2_deg * kDeg);
    const auto result = equilibrium::solve_tip_pose(model, cfg.settings);
    const Vec3 straight = model.params.straight_tip();
    const Vec3 tip_mm = result.tip.position * 1e3;

    out << "tip_mm: " << format_number(tip_mm.x()) << ' ' << format_number(tip_mm.y()) << ' '
        << format_number(tip_mm.z()) << '\n'
        << "tangent: " << format_number(result.tip.tangent.x()) << ' ' << format_number(result.tip.tangent.y())
        << ' ' << format_number(result.tip.tangent.z()) << '\n'
        << "deflection_mm: " << format_number((result.tip.position - straight).norm() * 1e3) << '\n'
        << "iterations: " << result.iterations << '\n'
        << "converged: " << (result.converged ? "yes" : "no") << '\n';

    report["result"] = equilibrium_json(result, straight);
    if (!out_path.empty()) write_text_file(out_path, report.finish());
    return result.converged ? kSuccess : kNumericalFailure;
}

struct SweepArgs {
    std::string theta1 = "0:12:180";
    std::string theta2 = "0";
    std::string schedule;
    bool zip = false;
    bool parallel = false;
    std::string out_path;
    std::string report_path;
};

int cmd_sweep(const ModelOptions& mo, const SweepArgs& a, std::ostream& out) {
    RobotConfig cfg = mo.load();
    std::vector<double> t1;
    std::vector<double> t2;
    equilibrium::SweepOptions options;
    options.parallel = a.parallel;
    if (!a.schedule.empty()) {
        std::tie(t1, t2) = parse_schedule(read_csv(a.schedule));
        options.pattern = equilibrium::SweepPattern::zipped;
    } else {
        for (double d : parse_step_range(a.theta1)) t1.push_back(d * kDeg);
        for (double d : parse_step_range(a.theta2)) t2.push_back(d * kDeg);
        if (a.zip) {
            if (t1.size() != t2.size()) throw InputError("sweep: --zip needs equal-length --theta1/--theta2 ranges");
            options.pattern = equilibrium::SweepPattern::zipped;
        }
    }
    const auto points = equilibrium::sweep(cfg.model, cfg.settings, t1, t2, options);
    const std::string csv = write_sweep(points);
    if (a.out_path.empty()) {
        out << csv;
    } else {
        write_text_file(a.out_path, csv);
    }

    bool all_converged = true;
    json rows = json::array();
    for (const auto& p : points) {
        const bool ok = p.result && p.result->converged;
        all_converged = all_converged && ok;
        json row = {{"theta1_deg", p.theta1 / kDeg}, {"theta2_deg", p.theta2 / kDeg}};
        if (p.result) row["result"] = equilibrium_json(*p.result, cfg.model.params.straight_tip());
        if (!p.error.empty()) row["error"] = p.error;
        rows.push_back(row);
    }
    if (!a.report_path.empty()) {
        Report report("sweep", cfg, mo.config_path);
        report.arguments() = {{"theta1", a.theta1}, {"theta2", a.theta2}, {"schedule", a.schedule},
                              {"zip", a.zip}, {"parallel", a.parallel}};
        report["points"] = rows;
        write_text_file(a.report_path, report.finish());
    }
    return all_converged ? kSuccess : kNumericalFailure;
}

struct DataArgs {
    std::string data_path;
    std::optional<double> notch_slope;
    std::optional<double> notch_offset;

    void attach(CLI::App* cmd) {
        cmd->add_option("--data", data_path, "Experiment CSV")->required();
        cmd->add_option("--notch-slope", notch_slope, "Notch transform slope, deg per mm");
        cmd->add_option("--notch-offset", notch_offset, "Notch transform offset, mm");
    }

    std::vector<calibration::ExperimentRecord> load() const {
        std::optional<NotchFlags> notch;
        if (notch_slope || notch_offset) {
            if (!(notch_slope && notch_offset)) {
                throw InputError("--notch-slope and --notch-offset must be given together");
            }
            notch = NotchFlags{*notch_slope, *notch_offset};
        }
        return parse_experiment(read_csv(data_path), notch);
    }
};

json grid_json(const calibration::CalibrationGrid& grid, const calibration::CalibrationResult& r) {
    json surface = json::array();
    for (const auto& row : r.error_surface) {
        for (double v : row) surface.push_back(v * 1e3);
    }
    return {{"ke", grid.ke_values},
            {"kb", grid.kb_values},
            {"surface_mm", surface},
            {"layout", "row-major, ke index major: surface_mm[i * len(kb) + j] at (ke[i], kb[j]); null = failed cell"}};
}

int cmd_calibrate(const ModelOptions& mo, const DataArgs& data, const std::string& ke_range,
                  const std::string& kb_range, const std::string& out_path, const std::string& surface_path,
                  std::ostream& out) {
    RobotConfig cfg = mo.load();
    const auto records = data.load();
    calibration::CalibrationGrid grid{parse_span(ke_range, 25), parse_span(kb_range, 25)};
    try {
        grid.validate();
    } catch (const ContractViolation& e) {
        throw InputError(e.what());
    }
    const auto result = calibration::grid_search_calibrate(records, cfg.model, grid, cfg.settings);

    Report report("calibrate", cfg, mo.config_path);
    report.arguments() = {{"data", data.data_path}, {"ke", ke_range}, {"kb", kb_range}};
    if (data.notch_slope) {
        report.arguments()["notch_slope_deg_per_mm"] = *data.notch_slope;
        report.arguments()["notch_offset_mm"] = *data.notch_offset;
    }
    report["ke_star"] = result.ke_star;
    report["kb_star"] = result.kb_star;
    report["metrics"] = metrics_json(result.metrics_at_optimum);
    report["grid"] = grid_json(grid, result);
    write_text_file(out_path, report.finish());

    if (!surface_path.empty()) {
        std::ostringstream csv;
        csv << "ke,kb,max_abs_error_mm\n";
        for (std::size_t i = 0; i < grid.ke_values.size(); ++i) {
            for (std::size_t j = 0; j < grid.kb_values.size(); ++j) {
                const double v = result.error_surface[i][j];
                csv << format_number(grid.ke_values[i]) << ',' << format_number(grid.kb_values[j]) << ','
                    << (std::isfinite(v) ? format_number(v * 1e3) : std::string("inf")) << '\n';
            }
        }
        write_text_file(surface_path, csv.str());
    }
    out << "ke_star: " << format_number(result.ke_star) << "\nkb_star: " << format_number(result.kb_star)
        << "\nmax_abs_error_mm: " << format_number(result.metrics_at_optimum.max_abs_error * 1e3) << '\n';
    return kSuccess;
}

// Lateral in-plane deflection used for the validation plot: y for top-view
// records, z for side-view, transverse magnitude otherwise.
double lateral_component(const calibration::ExperimentRecord& r, const Vec3& p, const Vec3& straight) {
    const Vec3 d = p - straight;
    switch (r.plane) {
        case calibration::MeasurementPlane::top: return d.y();
        case calibration::MeasurementPlane::side: return d.z();
        case calibration::MeasurementPlane::full: break;
    }
    return std::hypot(d.y(), d.z());
}

int cmd_validate(const ModelOptions& mo, const DataArgs& data, const std::string& out_path,
                 const std::string& plot_path, std::ostream& out) {
    RobotConfig cfg = mo.load();
    const auto records = data.load();
    const auto predictions = calibration::predict(cfg.model, cfg.settings, records);
    if (!predictions) throw DivergenceError("validate: forward model failed for at least one record");
    const Vec3 straight = cfg.model.params.straight_tip();
    const auto metrics = calibration::evaluate_metrics(records, *predictions, straight);

    json table = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        json measured = json::array();
        for (int axis = 0; axis < 3; ++axis) {
            if (std::isfinite(r.tip[axis])) {
                measured.push_back(r.tip[axis] * 1e3);
            } else {
                measured.push_back(nullptr);
            }
        }
        table.push_back({{"theta1_deg", r.theta1 / kDeg},
                         {"theta2_deg", r.theta2 / kDeg},
                         {"plane", plane_name(r.plane)},
                         {"measured_mm", measured},
                         {"predicted_mm", vec_mm((*predictions)[i].position)},
                         {"error_mm", calibration::in_plane_error(r, (*predictions)[i].position) * 1e3}});
    }
    Report report("validate", cfg, mo.config_path);
    report.arguments() = {{"data", data.data_path}};
    report["records"] = table;
    report["metrics"] = metrics_json(metrics);
    write_text_file(out_path, report.finish());

    if (!plot_path.empty()) {
        SvgPlot plot("Measured vs predicted tip deflection", "theta1 [deg]", "lateral deflection [mm]");
        std::vector<Vec2> measured;
        std::vector<Vec2> predicted;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double t = records[i].theta1 / kDeg;
            measured.emplace_back(t, lateral_component(records[i], records[i].tip, straight) * 1e3);
            predicted.emplace_back(t, lateral_component(records[i], (*predictions)[i].position, straight) * 1e3);
            plot.error_bar(measured.back(), predicted.back(), "#999999");
        }
        plot.polyline(predicted, "#d62728");
        plot.markers(measured, "#1f77b4");
        plot.legend("measured", "#1f77b4");
        plot.legend("model", "#d62728");
        write_text_file(plot_path, plot.render());
    }
    out << "max_abs_error_mm: " << format_number(metrics.max_abs_error * 1e3)
        << "\nmean_abs_error_mm: " << format_number(metrics.mean_abs_error * 1e3)
        << "\nstd_error_mm: " << format_number(metrics.std_error * 1e3)
        << "\nr_squared: " << format_number(metrics.r_squared) << '\n';
    return kSuccess;
}

struct WorkspaceArgs {
    std::string schedule;
    std::string top;
    std::string side;
    double x_tolerance_mm = 2.0;
    std::string out_path;
    std::string plot_path;
};

int cmd_workspace(const ModelOptions& mo, const WorkspaceArgs& a, std::ostream& out) {
    RobotConfig cfg = mo.load();
    const bool from_schedule = !a.schedule.empty();
    if (from_schedule == (!a.top.empty() || !a.side.empty())) {
        throw InputError("workspace: give either --schedule or both --top and --side");
    }
    const Vec3 straight = cfg.model.params.straight_tip();

    Report report("workspace", cfg, mo.config_path);
    std::vector<Vec3> points;
    json flagged = json::array();
    if (from_schedule) {
        report.arguments() = {{"schedule", a.schedule}};
        const auto [t1, t2] = parse_schedule(read_csv(a.schedule));
        const auto sweep = equilibrium::sweep(cfg.model, cfg.settings, t1, t2,
                                              {equilibrium::SweepPattern::zipped, false, 0});
        json failed = json::array();
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            if (sweep[i].result && sweep[i].result->converged) {
                points.push_back(sweep[i].result->tip.position);
            } else {
                failed.push_back(i);
            }
        }
        report["failed_schedule_rows"] = failed;
    } else {
        if (a.top.empty() || a.side.empty()) throw InputError("workspace: --top and --side are both required");
        report.arguments() = {{"top", a.top}, {"side", a.side}, {"x_tolerance_mm", a.x_tolerance_mm}};
        const auto top = parse_track(read_csv(a.top), workspace::ViewPlane::top);
        const auto side = parse_track(read_csv(a.side), workspace::ViewPlane::side);
        std::vector<workspace::MergedPoint> merged;
        try {
            merged = workspace::merge_biplanar(top, side, a.x_tolerance_mm * 1e-3);
        } catch (const ContractViolation& e) {
            throw InputError(e.what());
        }
        for (std::size_t i = 0; i < merged.size(); ++i) {
            points.push_back(merged[i].position);
            if (merged[i].flagged) flagged.push_back(top.indices[i]);
        }
        report["flagged_indices"] = flagged;
    }
    if (points.size() < 6) throw DivergenceError("workspace: fewer than 6 usable tip points");

    std::vector<Vec2> yz;
    for (const auto& p : points) yz.emplace_back(p.y(), p.z());
    const auto fit = workspace::fit_ellipse(yz);
    const auto stats = workspace::workspace_stats(points, straight);

    json pts = json::array();
    for (const auto& p : points) pts.push_back(vec_mm(p));
    report["points_mm"] = pts;
    report["ellipse"] = {{"plane", "y-z"},
                         {"center_mm", {fit.ellipse.center.x() * 1e3, fit.ellipse.center.y() * 1e3}},
                         {"semi_axes_mm", {fit.ellipse.a * 1e3, fit.ellipse.b * 1e3}},
                         {"orientation_rad", fit.ellipse.orientation},
                         {"rms_distance_mm", fit.rms_distance * 1e3}};
    report["stats"] = {{"max_deflection_y_mm", stats.max_deflection_y * 1e3},
                       {"max_deflection_z_mm", stats.max_deflection_z * 1e3},
                       {"mean_deflection_mm", stats.mean_deflection * 1e3},
                       {"rms_over_mean_deflection",
                        stats.mean_deflection > 0.0 ? fit.rms_distance / stats.mean_deflection : 0.0}};
    write_text_file(a.out_path, report.finish());

    if (!a.plot_path.empty()) {
        SvgPlot plot("Tip workspace (y-z projection)", "y [mm]", "z [mm]");
        plot.equal_aspect(true);
        std::vector<Vec2> curve;
        for (int k = 0; k < 180; ++k) curve.push_back(fit.ellipse.point_at(2.0 * std::numbers::pi * k / 180.0) * 1e3);
        std::vector<Vec2> tips;
        for (const auto& p : yz) tips.push_back(p * 1e3);
        plot.polyline(curve, "#d62728", true);
        plot.markers(tips, "#1f77b4");
        plot.legend("tip positions", "#1f77b4");
        plot.legend("fitted ellipse", "#d62728");
        write_text_file(a.plot_path, plot.render());
    }
    out << "points: " << points.size() << "\nellipse_semi_axes_mm: " << format_number(fit.ellipse.a * 1e3) << ' '
        << format_number(fit.ellipse.b * 1e3) << "\nrms_distance_mm: " << format_number(fit.rms_distance * 1e3)
        << "\nmax_deflection_y_mm: " << format_number(stats.max_deflection_y * 1e3)
        << "\nmax_deflection_z_mm: " << format_number(stats.max_deflection_z * 1e3)
        << "\nmean_deflection_mm: " << format_number(stats.mean_deflection * 1e3) << '\n';
    return kSuccess;
}

}  // namespace

std::vector<double> parse_step_range(const std::string& text) {
    const auto parts = split_colon(text);
    if (parts.size() == 1) return {parse_double(parts[0], "range")};
    if (parts.size() != 3) throw InputError("range '" + text + "': expected start:step:stop or a single value");
    const double start = parse_double(parts[0], "range start");
    const double step = parse_double(parts[1], "range step");
    const double stop = parse_double(parts[2], "range stop");
    if (start == stop) return {start};
    if (step == 0.0 || (stop - start) / step < 0.0) {
        throw InputError("range '" + text + "': step does not move from start toward stop");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1000000) throw InputError("range '" + text + "': too many values");
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = start + step * static_cast<double>(i);
    return values;
}

std::vector<double> parse_span(const std::string& text, std::size_t default_count) {
    const auto parts = split_colon(text);
    if (parts.size() == 1) return {parse_double(parts[0], "span")};
    if (parts.size() != 2 && parts.size() != 3) throw InputError("span '" + text + "': expected lo:hi[:n]");
    const double lo = parse_double(parts[0], "span lo");
    const double hi = parse_double(parts[1], "span hi");
    std::size_t n = default_count;
    if (parts.size() == 3) {
        const double count = parse_double(parts[2], "span count");
        if (count < 1 || count != std::floor(count)) throw InputError("span '" + text + "': count must be a positive integer");
        n = static_cast<std::size_t>(count);
    }
    if (n > 1 && !(hi > lo)) throw InputError("span '" + text + "': need lo < hi");
    return calibration::CalibrationGrid::linspace(lo, hi, n);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"magbeam: magnetic continuum robot simulation, calibration and workspace analysis", "magbeam"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    ModelOptions sim_model;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Equilibrium tip pose for one (theta1, theta2)");
    sim_model.attach(simulate, true);
    simulate->add_option("--theta1", theta1, "Distal magnet angle, deg")->required();
    simulate->add_option("--theta2", theta2, "Proximal magnet angle, deg")->required();
    simulate->add_option("--out", sim_out, "JSON run report");

    ModelOptions sweep_model;
    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Equilibrium over a grid or schedule of angles");
    sweep_model.attach(sweep, true);
    sweep->add_option("--theta1", sweep_args.theta1, "start:step:stop in deg (default 0:12:180)");
    sweep->add_option("--theta2", sweep_args.theta2, "start:step:stop or a fixed value in deg (default 0)");
    sweep->add_option("--schedule", sweep_args.schedule, "Zipped schedule CSV (theta1_deg,theta2_deg)");
    sweep->add_flag("--zip", sweep_args.zip, "Pair the two ranges element-wise instead of a Cartesian product");
    sweep->add_flag("--parallel", sweep_args.parallel, "Solve points independently (no warm start)");
    sweep->add_option("--out", sweep_args.out_path, "Output CSV (stdout when omitted)");
    sweep->add_option("--report", sweep_args.report_path, "JSON run report");

    ModelOptions cal_model;
    DataArgs cal_data;
    std::string ke_range = "0.009:0.018";
    std::string kb_range = "3.5:4.5";
    std::string cal_out;
    std::string surface_out;
    auto* calibrate = app.add_subcommand("calibrate", "Minimax grid search over (K_E, K_B)");
    cal_model.attach(calibrate, false);
    cal_data.attach(calibrate);
    calibrate->add_option("--ke", ke_range, "lo:hi[:n] (default 0.009:0.018:25)");
    calibrate->add_option("--kb", kb_range, "lo:hi[:n] (default 3.5:4.5:25)");
    calibrate->add_option("--out", cal_out, "Calibration JSON")->required();
    calibrate->add_option("--surface", surface_out, "Error surface CSV");

    ModelOptions val_model;
    DataArgs val_data;
    std::string val_out;
    std::string val_plot;
    auto* validate = app.add_subcommand("validate", "Compare model predictions with measurements");
    val_model.attach(validate, true);
    val_data.attach(validate);
    validate->add_option("--out", val_out, "Validation JSON")->required();
    validate->add_option("--plot", val_plot, "SVG plot of measured vs predicted deflection");

    ModelOptions ws_model;
    WorkspaceArgs ws_args;
    auto* ws = app.add_subcommand("workspace", "Workspace reconstruction, ellipse fit and statistics");
    ws_model.attach(ws, true);
    ws->add_option("--schedule", ws_args.schedule, "Zipped actuation schedule CSV (model-generated points)");
    ws->add_option("--top", ws_args.top, "Top-view track CSV (index,x_mm,y_mm)");
    ws->add_option("--side", ws_args.side, "Side-view track CSV (index,x_mm,z_mm)");
    ws->add_option("--x-tolerance-mm", ws_args.x_tolerance_mm, "Allowed x disagreement between views")
        ->check(CLI::NonNegativeNumber);
    ws->add_option("--out", ws_args.out_path, "Workspace JSON")->required();
    ws->add_option("--plot", ws_args.plot_path, "SVG of the y-z projection and fitted ellipse");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*simulate) return cmd_simulate(sim_model, theta1, theta2, sim_out, out);
        if (*sweep) return cmd_sweep(sweep_model, sweep_args, out);
        if (*calibrate) return cmd_calibrate(cal_model, cal_data, ke_range, kb_range, cal_out, surface_out, out);
        if (*validate) return cmd_validate(val_model, val_data, val_out, val_plot, out);
        if (*ws) return cmd_workspace(ws_model, ws_args, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const ContractViolation& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const DivergenceError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const SingularityError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const CalibrationError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::domain_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kInputError;
}

}  // namespace magbeam::cli
