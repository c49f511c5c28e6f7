// Regenerates the synthetic datasets under data/ from the demonstrator config.
//   make_synthetic_data <config.json> <output-dir>

#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "csv_io.hpp"
#include "magbeam/rng.hpp"

using namespace magbeam;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr std::uint64_t kSweepSeed = 20240501;
constexpr std::uint64_t kTrackSeed = 20240502;

equilibrium::EquilibriumResult solve(const equilibrium::Model& model, double t1, double t2) {
    equilibrium::Model m = model;
    m.pair = model.pair.with_angles(t1, t2);
    equilibrium::SolverSettings tight;
    tight.position_tolerance = 1e-10;
    return equilibrium::solve_tip_pose(m, tight);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: make_synthetic_data <config.json> <output-dir>\n";
        return 2;
    }
    const auto config = cli::load_config(argv[1]);
    const std::filesystem::path out = argv[2];
    std::filesystem::create_directories(out);

    // 16-point theta1 sweep at (K_E, K_B) = (0.012, 4.0), theta2 = 0, uniform
    // +-0.5 mm noise on every component.
    equilibrium::Model truth = config.model;
    truth.params.stiffness_scale = 0.012;
    truth.cal.k_b = 4.0;
    DeterministicRng sweep_rng(kSweepSeed);
    std::vector<calibration::ExperimentRecord> records;
    for (int k = 0; k <= 15; ++k) {
        const double t1 = 12.0 * k * kDeg;
        calibration::ExperimentRecord r{t1, 0.0, solve(truth, t1, 0.0).tip.position,
                                        calibration::MeasurementPlane::full};
        for (int a = 0; a < 3; ++a) r.tip[a] += sweep_rng.uniform(-0.5e-3, 0.5e-3);
        records.push_back(r);
    }
    cli::write_text_file(out / "synthetic-sweep.csv", cli::write_experiment(records));

    // Synchronized phase sweep theta1 = theta2 = phi, 10 deg steps.
    std::ostringstream schedule;
    schedule << "theta1_deg,theta2_deg\n";
    std::vector<double> phases;
    for (int k = 0; k < 36; ++k) {
        phases.push_back(10.0 * k * kDeg);
        schedule << cli::format_angle(phases.back()) << ',' << cli::format_angle(phases.back()) << '\n';
    }
    cli::write_text_file(out / "synthetic-ellipse-schedule.csv", schedule.str());

    // Camera tracks of the same loop at the config's parameters, Gaussian noise sigma = 0.3 mm.
    DeterministicRng track_rng(kTrackSeed);
    workspace::PlanarTrack top{workspace::ViewPlane::top, {}, {}};
    workspace::PlanarTrack side{workspace::ViewPlane::side, {}, {}};
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const Vec3 p = solve(config.model, phases[k], phases[k]).tip.position;
        top.points.emplace_back(p.x() + track_rng.normal(0, 0.3e-3), p.y() + track_rng.normal(0, 0.3e-3));
        side.points.emplace_back(p.x() + track_rng.normal(0, 0.3e-3), p.z() + track_rng.normal(0, 0.3e-3));
        top.indices.push_back(static_cast<long long>(k));
        side.indices.push_back(static_cast<long long>(k));
    }
    cli::write_text_file(out / "synthetic-top.csv", cli::write_track(top));
    cli::write_text_file(out / "synthetic-side.csv", cli::write_track(side));
    return 0;
}
