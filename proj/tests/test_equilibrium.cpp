#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fixtures.hpp"
#include "magbeam/equilibrium.hpp"
#include "magbeam/errors.hpp"

using namespace magbeam;
using namespace magbeam::equilibrium;
using fixtures::kDeg;

namespace {

constexpr double kPi = std::numbers::pi;

SolverSettings tight() {
    SolverSettings s;
    s.position_tolerance = 1e-9;
    return s;
}

EquilibriumResult solve_at(double t1, double t2, SolverSettings settings = {}) {
    return solve_tip_pose(fixtures::with_angles(fixtures::demonstrator(), t1, t2), settings);
}

}  // namespace

TEST(Solver, AntiparallelPairIsStraight) {
    for (double t2 : {0.0, 0.4, 2.0}) {
        const auto r = solve_at(t2 + kPi, t2);
        EXPECT_TRUE(r.converged);
        EXPECT_LE(r.iterations, 2);
        EXPECT_LE((r.tip.position - Vec3(0.15, 0, 0)).norm(), 1e-12);
    }
}

TEST(Solver, ZeroMomentIsStraight) {
    auto model = fixtures::demonstrator();
    model.pair = geomag::RingPairConfig::make(0.0, 0.3, 0.9, 0.0);
    const auto r = solve_tip_pose(model);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_EQ(r.tip.position, Vec3(0.15, 0, 0));
}

TEST(Solver, ConvergedResidualRecomputesBelowTolerance) {
    const SolverSettings settings;
    for (double t1 = 0; t1 <= 180; t1 += 12) {
        auto model = fixtures::with_angles(fixtures::demonstrator(), t1 * kDeg, 0.0);
        const auto r = solve_tip_pose(model, settings);
        ASSERT_TRUE(r.converged) << t1;
        EXPECT_LE(r.residual, settings.position_tolerance);
        EXPECT_DOUBLE_EQ(fixed_point_residual(model, r.tip), r.residual);
    }
}

TEST(Solver, ReferenceSweepDeflection) {
    // Frozen from an independent NumPy fixed-point prototype run to 1e-14 m.
    const auto r = solve_at(0.0, 0.0, tight());
    EXPECT_NEAR(r.tip.position.z() * 1e3, 17.05083904, 5e-6);
    EXPECT_NEAR(r.tip.position.y(), 0.0, 1e-12);
    const auto r60 = solve_at(60 * kDeg, 0.0, tight());
    EXPECT_NEAR(r60.tip.position.y() * 1e3, -7.44295654, 5e-6);
    EXPECT_NEAR(r60.tip.position.z() * 1e3, 12.89157888, 5e-6);
}

TEST(Solver, InitialGuessRobustness) {
    const SolverSettings base;
    const auto neighbour = solve_at(48 * kDeg, 0.0);
    ASSERT_TRUE(neighbour.converged);
    for (double t1 : {36.0, 60.0, 96.0}) {
        const auto cold = solve_at(t1 * kDeg, 0.0, base);
        SolverSettings warm = base;
        warm.initial_tip = neighbour.tip.position;
        warm.initial_tangent = neighbour.tip.tangent;
        const auto hot = solve_at(t1 * kDeg, 0.0, warm);
        ASSERT_TRUE(cold.converged && hot.converged);
        EXPECT_LE((cold.tip.position - hot.tip.position).norm(), 2 * base.position_tolerance);
    }
}

TEST(Solver, MirrorSymmetry) {
    const SolverSettings s;
    for (auto [t1, t2] : {std::pair{30.0, 70.0}, std::pair{100.0, -20.0}, std::pair{12.0, 0.0}}) {
        const auto a = solve_at(t1 * kDeg, t2 * kDeg, s);
        const auto b = solve_at(-t1 * kDeg, -t2 * kDeg, s);
        const Vec3 reflected(a.tip.position.x(), -a.tip.position.y(), a.tip.position.z());
        EXPECT_LE((reflected - b.tip.position).norm(), 2 * s.position_tolerance);
    }
}

TEST(Solver, TwoPiPeriodicity) {
    const SolverSettings s;
    const auto a = solve_at(0.7, -1.3, s);
    const auto b = solve_at(0.7 + 2 * kPi, -1.3 + 2 * kPi, s);
    EXPECT_LE((a.tip.position - b.tip.position).norm(), 2 * s.position_tolerance);
}

TEST(Solver, SuperpositionAtZeroSeparation) {
    const SolverSettings s;
    const double m = fixtures::demonstrator().pair.distal.moment_magnitude;
    for (auto [t1, t2] : {std::pair{0.2, 1.4}, std::pair{2.5, -0.4}}) {
        const auto pair = solve_at(t1, t2, s);
        auto single = fixtures::demonstrator();
        // m(t1) + m(t2) = 2 m cos((t1 - t2)/2) at angle (t1 + t2)/2.
        single.pair = geomag::RingPairConfig::make(0.0, 0.0, 0.0, 0.0);
        single.pair.distal = {2 * m * std::cos((t1 - t2) / 2), (t1 + t2) / 2, 0.0};
        const auto one = solve_tip_pose(single, s);
        EXPECT_LE((pair.tip.position - one.tip.position).norm(), 2 * s.position_tolerance);
    }
}

TEST(Solver, NonConvergenceIsReported) {
    SolverSettings s;
    s.max_iterations = 2;
    const auto r = solve_at(0.0, 0.0, s);
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.residual, s.position_tolerance);
    EXPECT_DOUBLE_EQ(r.residual, fixed_point_residual(fixtures::with_angles(fixtures::demonstrator(), 0, 0), r.tip));
}

TEST(Solver, DivergesNearStrongSource) {
    // Very soft beam next to the source: the first step overshoots past 10 L.
    auto model = fixtures::with_angles(fixtures::demonstrator(1e-6, 1.0), 0.0, 0.0);
    EXPECT_THROW(solve_tip_pose(model), DivergenceError);
}

TEST(Solver, SingularInitialTip) {
    auto model = fixtures::with_angles(fixtures::demonstrator(0.009, 1.0), 0.0, 0.0);
    SolverSettings s;
    s.initial_tip = Vec3(0.23, 0, 0);
    EXPECT_THROW(solve_tip_pose(model, s), SingularityError);
}

TEST(Solver, RejectsBadSettings) {
    SolverSettings s;
    s.relaxation = 0.0;
    EXPECT_THROW(solve_at(0, 0, s), ContractViolation);
    s = {};
    s.max_iterations = 0;
    EXPECT_THROW(solve_at(0, 0, s), ContractViolation);
    s = {};
    s.position_tolerance = -1;
    EXPECT_THROW(solve_at(0, 0, s), ContractViolation);
}

TEST(Sweep, SinglePointEqualsDirectSolve) {
    const auto model = fixtures::demonstrator();
    const auto pts = sweep(model, {}, {0.5}, {1.0});
    ASSERT_EQ(pts.size(), 1u);
    const auto direct = solve_tip_pose(fixtures::with_angles(model, 0.5, 1.0));
    ASSERT_TRUE(pts[0].result);
    EXPECT_EQ(pts[0].result->tip.position, direct.tip.position);
    EXPECT_EQ(pts[0].result->iterations, direct.iterations);
}

TEST(Sweep, ReferenceSweepAllConverge) {
    std::vector<double> t1;
    for (int k = 0; k <= 15; ++k) t1.push_back(12.0 * k * kDeg);
    const SolverSettings s;
    const auto pts = sweep(fixtures::demonstrator(), s, t1, {0.0});
    ASSERT_EQ(pts.size(), 16u);
    for (const auto& p : pts) {
        ASSERT_TRUE(p.result && p.result->converged);
        const auto cold = solve_at(p.theta1, p.theta2, s);
        EXPECT_LE((cold.tip.position - p.result->tip.position).norm(), 2 * s.position_tolerance);
    }
    // Antiparallel endpoint is straight.
    EXPECT_LE((pts.back().result->tip.position - Vec3(0.15, 0, 0)).norm(), 2 * s.position_tolerance);
}

TEST(Sweep, CartesianOrderIsTheta1Major) {
    const auto pts = sweep(fixtures::demonstrator(), {}, {0.0, 1.0}, {2.0, 3.0, 4.0});
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(pts[1].theta1, 0.0);
    EXPECT_EQ(pts[1].theta2, 3.0);
    EXPECT_EQ(pts[3].theta1, 1.0);
    EXPECT_EQ(pts[3].theta2, 2.0);
}

TEST(Sweep, ZippedPattern) {
    SweepOptions opt;
    opt.pattern = SweepPattern::zipped;
    const auto pts = sweep(fixtures::demonstrator(), {}, {0.0, 1.0, 2.0}, {0.5, 1.5, 2.5}, opt);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[2].theta2, 2.5);
    EXPECT_THROW(sweep(fixtures::demonstrator(), {}, {0.0, 1.0}, {0.5}, opt), ContractViolation);
    EXPECT_THROW(sweep(fixtures::demonstrator(), {}, {}, {0.5}), ContractViolation);
}

TEST(Sweep, FailuresAreRecordedPerPoint) {
    auto model = fixtures::demonstrator(1e-6, 1.0);
    const auto pts = sweep(model, {}, {0.0, kPi}, {0.0});
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_FALSE(pts[0].result.has_value());
    EXPECT_FALSE(pts[0].error.empty());
    ASSERT_TRUE(pts[1].result.has_value());
    EXPECT_TRUE(pts[1].result->converged);
}

TEST(Sweep, ParallelIsBitwiseDeterministic) {
    std::vector<double> t1, t2;
    for (int k = 0; k < 8; ++k) t1.push_back(0.4 * k);
    for (int k = 0; k < 3; ++k) t2.push_back(0.9 * k);
    SweepOptions opt;
    opt.parallel = true;
    opt.threads = 4;
    const auto a = sweep(fixtures::demonstrator(), {}, t1, t2, opt);
    opt.threads = 1;
    const auto b = sweep(fixtures::demonstrator(), {}, t1, t2, opt);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].result.has_value(), b[i].result.has_value());
        EXPECT_EQ(a[i].theta1, b[i].theta1);
        EXPECT_EQ(a[i].theta2, b[i].theta2);
        if (a[i].result) {
            EXPECT_EQ(a[i].result->tip.position, b[i].result->tip.position);
            EXPECT_EQ(a[i].result->iterations, b[i].result->iterations);
        }
    }
}

TEST(Inverse, StraightTargetPicksSmallestAntiparallelPair) {
    InverseTarget target{Vec3(0.15, 0, 0), std::nullopt, 0.0};
    const auto r = invert_controls(target, fixtures::demonstrator(), {});
    EXPECT_NEAR(r.theta1, 0.0, 1e-12);
    EXPECT_NEAR(r.theta2, kPi, 1e-12);
    EXPECT_LE(r.position_error, 1e-6);
    EXPECT_FALSE(r.outside_reachable);
    EXPECT_GE(r.solution_count, 1u);
}

TEST(Inverse, RoundTrip) {
    const SolverSettings s;
    for (auto [t1, t2] : {std::pair{40.0, 100.0}, std::pair{200.0, 15.0}}) {
        const auto fwd = solve_at(t1 * kDeg, t2 * kDeg, tight());
        InverseTarget target{fwd.tip.position, std::nullopt, 0.0};
        const auto r = invert_controls(target, fixtures::demonstrator(), s);
        EXPECT_LE(r.position_error, s.position_tolerance) << t1 << "," << t2;
        EXPECT_FALSE(r.outside_reachable);
        EXPECT_GE(r.theta1, 0.0);
        EXPECT_LT(r.theta1, 2 * kPi);
        EXPECT_GE(r.theta2, 0.0);
        EXPECT_LT(r.theta2, 2 * kPi);
        const auto check = solve_at(r.theta1, r.theta2, s);
        EXPECT_LE((check.tip.position - fwd.tip.position).norm(), 2 * s.position_tolerance);
    }
}

TEST(Inverse, FarTargetIsFlagged) {
    InverseTarget target{Vec3(0.30, 0, 0), std::nullopt, 0.0};
    InverseSettings inv;
    inv.grid_size = 12;
    const auto r = invert_controls(target, fixtures::demonstrator(), {}, inv);
    EXPECT_TRUE(r.outside_reachable);
    EXPECT_GT(r.position_error, 0.1);
}
