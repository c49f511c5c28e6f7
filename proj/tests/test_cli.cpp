#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app.hpp"
#include "config.hpp"
#include "csv_io.hpp"
#include "magbeam/calibration.hpp"
#include "magbeam/errors.hpp"

using namespace magbeam;
using namespace magbeam::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const fs::path kSource = MAGBEAM_SOURCE_DIR;
const fs::path kConfig = kSource / "configs" / "paper-demonstrator.json";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("magbeam_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    json demonstrator_json() const {
        std::ifstream in(kConfig);
        return json::parse(in);
    }

    fs::path write_config(const json& doc, const std::string& name = "config.json") const {
        return write(name, doc.dump(2));
    }

    static json read_json(const fs::path& p) {
        std::ifstream in(p);
        return json::parse(in);
    }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Ranges, StepRange) {
    EXPECT_EQ(parse_step_range("0:12:180").size(), 16u);
    EXPECT_EQ(parse_step_range("0:12:180").back(), 180.0);
    EXPECT_EQ(parse_step_range("0:360:0"), std::vector<double>{0.0});
    EXPECT_EQ(parse_step_range("45"), std::vector<double>{45.0});
    EXPECT_EQ(parse_step_range("10:-5:0"), (std::vector<double>{10, 5, 0}));
    EXPECT_THROW(parse_step_range("0:0:10"), InputError);
    EXPECT_THROW(parse_step_range("0:1"), InputError);
    EXPECT_THROW(parse_step_range("a:1:2"), InputError);
}

TEST(Ranges, Span) {
    const auto ke = parse_span("0.009:0.018", 25);
    ASSERT_EQ(ke.size(), 25u);
    EXPECT_EQ(ke.front(), 0.009);
    EXPECT_EQ(ke.back(), 0.018);
    EXPECT_EQ(parse_span("3.5:4.5:3", 25), (std::vector<double>{3.5, 4.0, 4.5}));
    EXPECT_THROW(parse_span("4.5:3.5", 25), InputError);
    EXPECT_THROW(parse_span("1:2:0", 25), InputError);
    EXPECT_THROW(parse_span("1:2:2.5", 25), InputError);
}

TEST(Csv, NumberFormattingRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 149.67255964714664, -1e-300, 6.02e23}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
    EXPECT_EQ(format_angle(60 * kDeg), "60");
    EXPECT_EQ(std::stod(format_angle(0.123456789)) * kDeg, 0.123456789);
}

TEST(Csv, ExperimentPlanesAndDefaults) {
    const auto table = parse_csv(
        "theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n"
        "12,,150,1.5,\n"
        "24,30,149,,2.5\n"
        "36,0,148,1,2\n");
    const auto recs = parse_experiment(table);
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].plane, calibration::MeasurementPlane::top);
    EXPECT_EQ(recs[0].theta2, 0.0);
    EXPECT_NEAR(recs[0].theta1, 12 * kDeg, 1e-15);
    EXPECT_EQ(recs[1].plane, calibration::MeasurementPlane::side);
    EXPECT_NEAR(recs[1].tip.z(), 2.5e-3, 1e-18);
    EXPECT_EQ(recs[2].plane, calibration::MeasurementPlane::full);

    const auto again = parse_experiment(parse_csv(write_experiment(recs)));
    ASSERT_EQ(again.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(again[i].plane, recs[i].plane);
        EXPECT_EQ(again[i].theta1, recs[i].theta1);
        for (int a : recs[i].observed_axes()) EXPECT_EQ(again[i].tip[a], recs[i].tip[a]);
    }
}

TEST(Csv, NotchColumn) {
    const auto table = parse_csv("notch_mm,theta2_deg,x_mm,y_mm,z_mm\n3,0,150,1,\n18,0,150,2,\n");
    const auto recs = parse_experiment(table, NotchFlags{8.2, 2.0});
    EXPECT_NEAR(recs[0].theta1 / kDeg, 8.2, 1e-12);
    EXPECT_NEAR(recs[1].theta1 / kDeg, 131.2, 1e-12);
    EXPECT_THROW(parse_experiment(table), InputError);
}

TEST(Csv, ExperimentErrors) {
    EXPECT_THROW(parse_experiment(parse_csv("theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n")), InputError);
    EXPECT_THROW(parse_experiment(parse_csv("theta1_deg,x_mm,y_mm,z_mm,colour\n0,1,2,3,red\n")), InputError);
    EXPECT_THROW(parse_experiment(parse_csv("theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n0,0,150,,\n")), InputError);
    EXPECT_THROW(parse_experiment(parse_csv("theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n0,0,abc,1,1\n")), InputError);
    EXPECT_THROW(parse_csv(""), InputError);
}

TEST(Csv, TrackRoundTrip) {
    workspace::PlanarTrack t{workspace::ViewPlane::side, {Vec2(0.15, 0.01), Vec2(0.1499, -0.0123456789)}, {3, 7}};
    const auto back = parse_track(parse_csv(write_track(t)), workspace::ViewPlane::side);
    EXPECT_EQ(back.indices, t.indices);
    ASSERT_EQ(back.points.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_LE((back.points[i] - t.points[i]).norm(), 1e-15 * t.points[i].norm());
    EXPECT_THROW(parse_track(parse_csv(write_track(t)), workspace::ViewPlane::top), InputError);
}

TEST_F(CliTest, ShippedConfigLoads) {
    const auto cfg = load_config(kConfig);
    EXPECT_NEAR(cfg.model.params.section_moment, 4.135121330287565e-13, 1e-25);
    EXPECT_NEAR(cfg.model.params.length, 0.15, 1e-15);
    EXPECT_NEAR(cfg.model.pair.distal.moment_magnitude, 5.4375e-3, 1e-15);
    EXPECT_NEAR(cfg.model.source.moment.x(), -200.485486125, 1e-9);
    EXPECT_NEAR(cfg.model.source.position.x(), 0.23, 1e-15);
    EXPECT_EQ(cfg.model.cal.k_b, 4.03);
    EXPECT_EQ(cfg.model.params.stiffness_scale, 0.009);
    EXPECT_NEAR(cfg.settings.position_tolerance, 1e-6, 1e-18);
}

TEST_F(CliTest, ConfigDiagnostics) {
    auto doc = demonstrator_json();
    doc["robot"]["colour"] = "red";
    try {
        parse_config(doc);
        FAIL() << "unknown key accepted";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("robot.colour"), std::string::npos);
    }
    doc = demonstrator_json();
    doc["robot"]["tube_id_mm"] = 2.0;
    EXPECT_THROW(parse_config(doc), InputError);
    doc = demonstrator_json();
    doc["solver"]["relaxation"] = 1.5;
    EXPECT_THROW(parse_config(doc), InputError);
    doc = demonstrator_json();
    doc["external_magnet"].erase("position_mm");
    EXPECT_THROW(parse_config(doc), InputError);
    doc = demonstrator_json();
    doc["beam_mode"] = "exact";
    EXPECT_THROW(parse_config(doc), InputError);

    doc = demonstrator_json();
    doc["external_magnet"]["moment_direction"] = {-3.0, 0.0, 0.0};
    EXPECT_NEAR(parse_config(doc).model.source.moment.x(), -200.485486125, 1e-9);

    const auto bad = write("broken.json", "{\n  \"robot\": {\n    \"length_mm\": 150,,\n  }\n}\n");
    const auto r = invoke({"simulate", "--config", bad.string(), "--theta1", "0", "--theta2", "0"});
    EXPECT_EQ(r.code, kInputError);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateAntiparallel) {
    const auto r = invoke({"simulate", "--config", kConfig.string(), "--theta1", "180", "--theta2", "0", "--out",
                           path("sim.json").string()});
    EXPECT_EQ(r.code, kSuccess) << r.err;
    EXPECT_NE(r.out.find("deflection_mm: 0\n"), std::string::npos) << r.out;
    const auto report = read_json(path("sim.json"));
    EXPECT_EQ(report["command"], "simulate");
    EXPECT_EQ(report["software"]["version"], kVersion);
    EXPECT_EQ(report["result"]["deflection_mm"], 0.0);
    EXPECT_TRUE(report["result"]["converged"].get<bool>());
}

TEST_F(CliTest, SimulateMatchesLibrary) {
    const auto r = invoke({"simulate", "--config", kConfig.string(), "--theta1", "36", "--theta2", "-20", "--out",
                           path("sim.json").string()});
    ASSERT_EQ(r.code, kSuccess);
    auto cfg = load_config(kConfig);
    cfg.model.pair = cfg.model.pair.with_angles(36 * kDeg, -20 * kDeg);
    const auto direct = equilibrium::solve_tip_pose(cfg.model, cfg.settings);
    const auto tip = read_json(path("sim.json"))["result"]["tip_mm"];
    for (int a = 0; a < 3; ++a) EXPECT_EQ(tip[static_cast<std::size_t>(a)].get<double>(), direct.tip.position[a] * 1e3);
}

TEST_F(CliTest, ReportEchoIsByteStable) {
    const auto out = path("a.json");
    ASSERT_EQ(invoke({"simulate", "--config", kConfig.string(), "--theta1", "10", "--theta2", "0", "--out",
                      out.string()}).code, kSuccess);
    const auto first = read_json(out)["inputs"].dump();
    ASSERT_EQ(invoke({"simulate", "--config", kConfig.string(), "--theta1", "10", "--theta2", "0", "--out",
                      out.string()}).code, kSuccess);
    EXPECT_EQ(read_json(out)["inputs"].dump(), first);
    EXPECT_EQ(read_json(out)["inputs"]["config"], demonstrator_json());
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(invoke({"simulate", "--config", path("missing.json").string(), "--theta1", "0", "--theta2", "0"}).code,
              kInputError);
    EXPECT_EQ(invoke({"simulate", "--config", kConfig.string(), "--theta1", "0"}).code, kInputError);
    EXPECT_EQ(invoke({"frobnicate"}).code, kInputError);
    // A floppy beam next to an unscaled source overshoots past 10 L.
    EXPECT_EQ(invoke({"simulate", "--config", kConfig.string(), "--theta1", "0", "--theta2", "0", "--ke", "1e-6",
                      "--kb", "1"}).code,
              kNumericalFailure);
    EXPECT_EQ(invoke({"--version"}).out, std::string(kVersion) + "\n");
}

TEST_F(CliTest, SweepRowsAndRoundTrip) {
    const auto csv = path("sweep.csv");
    const auto r = invoke({"sweep", "--config", kConfig.string(), "--theta1", "0:12:180", "--theta2", "0", "--out",
                           csv.string(), "--report", path("sweep.json").string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto table = read_csv(csv);
    EXPECT_EQ(table.header,
              (std::vector<std::string>{"theta1_deg", "theta2_deg", "x_mm", "y_mm", "z_mm", "converged"}));
    ASSERT_EQ(table.rows.size(), 16u);

    const auto cfg = load_config(kConfig);
    std::vector<double> theta1;
    for (double d : parse_step_range("0:12:180")) theta1.push_back(d * kDeg);
    const auto points = equilibrium::sweep(cfg.model, cfg.settings, theta1, {0.0});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& row = table.rows[i];
        EXPECT_EQ(std::stod(row[0]), 12.0 * static_cast<double>(i));
        for (int a = 0; a < 3; ++a) {
            EXPECT_EQ(std::stod(row[static_cast<std::size_t>(2 + a)]), points[i].result->tip.position[a] * 1e3);
        }
        EXPECT_EQ(row[5], "1");
    }
    const auto single = invoke({"sweep", "--config", kConfig.string(), "--theta1", "0:360:0"});
    ASSERT_EQ(single.code, kSuccess);
    EXPECT_EQ(parse_csv(single.out).rows.size(), 1u);
}

TEST_F(CliTest, SweepScheduleAndFailures) {
    const auto schedule = write("s.csv", "theta1_deg,theta2_deg\n0,0\n90,90\n180,180\n");
    const auto r = invoke({"sweep", "--config", kConfig.string(), "--schedule", schedule.string(), "--parallel"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    EXPECT_EQ(parse_csv(r.out).rows.size(), 3u);

    const auto failing = invoke({"sweep", "--config", kConfig.string(), "--theta1", "0:180:180", "--ke", "1e-6",
                                 "--kb", "1"});
    EXPECT_EQ(failing.code, kNumericalFailure);
    const auto table = parse_csv(failing.out);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0][5], "0");
    EXPECT_EQ(table.rows[1][5], "1");
}

TEST_F(CliTest, CalibrateRecoversGeneratingCell) {
    auto cfg = load_config(kConfig);
    cfg.model.params.stiffness_scale = 0.012;
    cfg.model.cal.k_b = 4.0;
    std::vector<calibration::ExperimentRecord> recs;
    for (double t1 : {0.0, 40.0, 80.0, 120.0}) {
        for (double t2 : {0.0, 60.0}) {
            auto m = cfg.model;
            m.pair = m.pair.with_angles(t1 * kDeg, t2 * kDeg);
            equilibrium::SolverSettings tight;
            tight.position_tolerance = 1e-10;
            recs.push_back({t1 * kDeg, t2 * kDeg, equilibrium::solve_tip_pose(m, tight).tip.position,
                            calibration::MeasurementPlane::full});
        }
    }
    const auto data = write("exp.csv", write_experiment(recs));
    const auto r = invoke({"calibrate", "--config", kConfig.string(), "--data", data.string(), "--ke",
                           "0.009:0.018:7", "--kb", "3.5:4.5:5", "--out", path("cal.json").string(), "--surface",
                           path("surface.csv").string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto cal = read_json(path("cal.json"));
    EXPECT_NEAR(cal["ke_star"].get<double>(), 0.012, 1e-15);
    EXPECT_NEAR(cal["kb_star"].get<double>(), 4.0, 1e-15);
    EXPECT_LE(cal["metrics"]["max_abs_error_mm"].get<double>(), 2e-3);

    // Surface CSV and JSON agree with the library.
    const auto parsed = parse_experiment(read_csv(data));
    const calibration::CalibrationGrid grid{parse_span("0.009:0.018:7", 25), parse_span("3.5:4.5:5", 25)};
    const auto lib = calibration::grid_search_calibrate(parsed, load_config(kConfig).model, grid,
                                                        load_config(kConfig).settings);
    const auto surface = read_csv(path("surface.csv"));
    ASSERT_EQ(surface.rows.size(), 35u);
    for (std::size_t k = 0; k < 35; ++k) {
        EXPECT_EQ(std::stod(surface.rows[k][0]), grid.ke_values[k / 5]);
        EXPECT_EQ(std::stod(surface.rows[k][1]), grid.kb_values[k % 5]);
        EXPECT_EQ(std::stod(surface.rows[k][2]), lib.error_surface[k / 5][k % 5] * 1e3);
        EXPECT_EQ(cal["grid"]["surface_mm"][k].get<double>(), lib.error_surface[k / 5][k % 5] * 1e3);
    }
}

TEST_F(CliTest, CalibrateInputErrors) {
    const auto empty = write("empty.csv", "");
    EXPECT_EQ(invoke({"calibrate", "--config", kConfig.string(), "--data", empty.string(), "--out",
                      path("c.json").string()}).code,
              kInputError);
    const auto header = write("header.csv", "theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n");
    EXPECT_EQ(invoke({"calibrate", "--config", kConfig.string(), "--data", header.string(), "--out",
                      path("c.json").string()}).code,
              kInputError);
    const auto ok = write("ok.csv", "theta1_deg,theta2_deg,x_mm,y_mm,z_mm\n0,0,150,0,10\n");
    EXPECT_EQ(invoke({"calibrate", "--config", kConfig.string(), "--data", ok.string(), "--out",
                      path("c.json").string(), "--notch-slope", "8.2"}).code,
              kInputError);
}

TEST_F(CliTest, ValidateReportMatchesLibraryMetrics) {
    const fs::path data = kSource / "data" / "synthetic-sweep.csv";
    const auto r = invoke({"validate", "--config", kConfig.string(), "--data", data.string(), "--ke", "0.012", "--kb",
                           "4.0", "--out", path("val.json").string(), "--plot", path("val.svg").string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto report = read_json(path("val.json"));
    auto cfg = load_config(kConfig);
    cfg.model.params.stiffness_scale = 0.012;
    cfg.model.cal.k_b = 4.0;
    const auto recs = parse_experiment(read_csv(data));
    const auto pred = calibration::predict(cfg.model, cfg.settings, recs);
    ASSERT_TRUE(pred);
    const auto m = calibration::evaluate_metrics(recs, *pred, cfg.model.params.straight_tip());
    EXPECT_EQ(report["metrics"]["max_abs_error_mm"].get<double>(), m.max_abs_error * 1e3);
    EXPECT_EQ(report["metrics"]["r_squared"].get<double>(), m.r_squared);
    ASSERT_EQ(report["records"].size(), recs.size());
    EXPECT_EQ(report["records"][3]["predicted_mm"][2].get<double>(), (*pred)[3].position.z() * 1e3);
    EXPECT_EQ(report["inputs"]["effective"]["ke"].get<double>(), 0.012);
    const std::string svg = slurp(path("val.svg"));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(CliTest, WorkspaceFromTracksAndSchedule) {
    const fs::path data = kSource / "data";
    const auto r = invoke({"workspace", "--config", kConfig.string(), "--top", (data / "synthetic-top.csv").string(),
                           "--side", (data / "synthetic-side.csv").string(), "--out", path("ws.json").string(),
                           "--plot", path("ws.svg").string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto ws = read_json(path("ws.json"));
    EXPECT_EQ(ws["points_mm"].size(), 36u);
    EXPECT_EQ(ws["ellipse"]["plane"], "y-z");
    const double a = ws["ellipse"]["semi_axes_mm"][0].get<double>();
    const double b = ws["ellipse"]["semi_axes_mm"][1].get<double>();
    EXPECT_GE(a, b);
    EXPECT_GT(b, 0.0);
    EXPECT_TRUE(ws["flagged_indices"].empty());

    const auto s = invoke({"workspace", "--config", kConfig.string(), "--schedule",
                           (data / "synthetic-ellipse-schedule.csv").string(), "--out", path("ws2.json").string()});
    ASSERT_EQ(s.code, kSuccess) << s.err;
    EXPECT_LE(read_json(path("ws2.json"))["stats"]["rms_over_mean_deflection"].get<double>(), 0.2);

    EXPECT_EQ(invoke({"workspace", "--config", kConfig.string(), "--out", path("x.json").string()}).code,
              kInputError);
}

#ifdef MAGBEAM_EXE
TEST(Executable, ExitCodes) {
    const std::string exe = MAGBEAM_EXE;
    auto status = [&](const std::string& args) {
        const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("simulate --config " + kConfig.string() + " --theta1 180 --theta2 0"), 0);
    EXPECT_EQ(status("simulate --config /nonexistent.json --theta1 0 --theta2 0"), 2);
    EXPECT_EQ(status("simulate --config " + kConfig.string() + " --theta1 0 --theta2 0 --ke 1e-6 --kb 1"), 3);
}
#endif
