#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "magbeam/equilibrium.hpp"
#include "magbeam/errors.hpp"
#include "magbeam/parallel.hpp"

namespace magbeam::equilibrium {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double periodic_distance(const Vec2& a, const Vec2& b) {
    Vec2 d;
    for (int i = 0; i < 2; ++i) {
        const double raw = std::abs(wrap_angle(a[i]) - wrap_angle(b[i]));
        d[i] = std::min(raw, kTwoPi - raw);
    }
    return d.norm();
}

bool lex_less(const Vec2& a, const Vec2& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
}

struct Evaluation {
    Vec2 q = Vec2::Zero();
    double objective = kInf;
    double position_error = kInf;
    std::optional<EquilibriumResult> forward;
};

struct SimplexOutcome {
    Vec2 best;
    double value;
    double diameter;
};

// Two-dimensional Nelder-Mead with standard coefficients.
SimplexOutcome nelder_mead(const std::function<double(const Vec2&)>& f, const Vec2& start, double step,
                           double tolerance, double target_value, int max_iterations) {
    std::array<Vec2, 3> x{start, start + Vec2(step, 0.0), start + Vec2(0.0, step)};
    std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};

    auto order = [&] {
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::array<Vec2, 3> xs{x[idx[0]], x[idx[1]], x[idx[2]]};
        std::array<double, 3> fs{fx[idx[0]], fx[idx[1]], fx[idx[2]]};
        x = xs;
        fx = fs;
    };
    auto diameter = [&] {
        return std::max({(x[0] - x[1]).norm(), (x[0] - x[2]).norm(), (x[1] - x[2]).norm()});
    };

    order();
    for (int it = 0; it < max_iterations; ++it) {
        if (diameter() < tolerance || fx[0] <= target_value) break;
        const Vec2 centroid = 0.5 * (x[0] + x[1]);
        const Vec2 xr = centroid + (centroid - x[2]);
        const double fr = f(xr);
        if (fr < fx[0]) {
            const Vec2 xe = centroid + 2.0 * (centroid - x[2]);
            const double fe = f(xe);
            if (fe < fr) {
                x[2] = xe;
                fx[2] = fe;
            } else {
                x[2] = xr;
                fx[2] = fr;
            }
        } else if (fr < fx[1]) {
            x[2] = xr;
            fx[2] = fr;
        } else {
            const bool outside = fr < fx[2];
            const Vec2 xc = outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (x[2] - centroid);
            const double fc = f(xc);
            if (fc < std::min(fr, fx[2])) {
                x[2] = xc;
                fx[2] = fc;
            } else {
                for (int i = 1; i < 3; ++i) {
                    x[i] = x[0] + 0.5 * (x[i] - x[0]);
                    fx[i] = f(x[i]);
                }
            }
        }
        order();
    }
    return {x[0], fx[0], diameter()};
}

}  // namespace

InverseResult invert_controls(const InverseTarget& target, const Model& model,
                              const SolverSettings& settings, const InverseSettings& inverse) {
    require(target.position.allFinite(), "invert_controls: target position must be finite");
    require(inverse.grid_size >= 2, "invert_controls: grid_size must be >= 2");
    require(inverse.simplex_tolerance > 0.0, "invert_controls: simplex_tolerance must be > 0");
    settings.validate();

    const double tol = settings.position_tolerance;
    const std::optional<Vec3> target_tangent =
        target.tangent ? std::optional<Vec3>(target.tangent->normalized()) : std::nullopt;

    InverseResult out;

    auto evaluate = [&](const Vec2& q, std::vector<std::string>* log) {
        Evaluation e;
        e.q = q;
        Model local = model;
        local.pair = model.pair.with_angles(q[0], q[1]);
        try {
            EquilibriumResult r = solve_tip_pose(local, settings);
            if (!r.converged) {
                if (log) {
                    std::ostringstream msg;
                    msg << "no convergence at q = (" << q[0] << ", " << q[1] << ") rad";
                    log->push_back(msg.str());
                }
                return e;
            }
            e.position_error = (r.tip.position - target.position).norm();
            e.objective = e.position_error;
            if (target_tangent) e.objective += target.tangent_weight * (r.tip.tangent - *target_tangent).norm();
            e.forward = r;
        } catch (const std::exception& ex) {
            if (log) log->push_back(std::string("skipped sample: ") + ex.what());
        }
        return e;
    };

    // Coarse grid, theta1-major.
    const int n = inverse.grid_size;
    const double h = kTwoPi / n;
    std::vector<Evaluation> grid(static_cast<std::size_t>(n * n));
    std::vector<std::vector<std::string>> grid_logs(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const int i = static_cast<int>(k) / n;
        const int j = static_cast<int>(k) % n;
        grid[k] = evaluate(Vec2(h * i, h * j), &grid_logs[k]);
    }, inverse.threads);
    for (auto& entries : grid_logs) {
        for (auto& line : entries) out.log.push_back(std::move(line));
    }
    for (const Evaluation& e : grid) {
        if (!e.forward) ++out.skipped_samples;
    }

    // Reachability: ellipse (y-z) and x band spanned by the coarse sweep around the straight tip.
    {
        const Vec3 straight = model.params.straight_tip();
        Vec3 extent = Vec3::Zero();
        for (const Evaluation& e : grid) {
            if (!e.forward) continue;
            extent = extent.cwiseMax((e.forward->tip.position - straight).cwiseAbs());
        }
        extent = inverse.reachable_margin * extent + Vec3::Constant(tol);
        const Vec3 d = target.position - straight;
        const double ellipse = std::pow(d.y() / extent.y(), 2) + std::pow(d.z() / extent.z(), 2);
        out.outside_reachable = ellipse > 1.0 || std::abs(d.x()) > extent.x();
    }

    // Seeds: periodic local minima of the grid objective.
    auto at = [&](int i, int j) -> const Evaluation& {
        return grid[static_cast<std::size_t>(((i + n) % n) * n + (j + n) % n)];
    };
    std::vector<const Evaluation*> seeds;
    std::vector<Evaluation> candidates;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Evaluation& e = at(i, j);
            if (!e.forward) continue;
            if (e.objective <= tol) {
                candidates.push_back(e);
                continue;
            }
            bool minimum = true;
            for (int di = -1; di <= 1 && minimum; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di || dj) && at(i + di, j + dj).objective < e.objective) {
                        minimum = false;
                        break;
                    }
                }
            }
            if (minimum) seeds.push_back(&e);
        }
    }
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const Evaluation* a, const Evaluation* b) { return a->objective < b->objective; });
    if (seeds.size() > inverse.max_refined_seeds) seeds.resize(inverse.max_refined_seeds);

    // Refinement only matters when no grid sample already meets the tolerance.
    if (candidates.empty()) {
        auto objective = [&](const Vec2& q) { return evaluate(q, nullptr).objective; };
        for (const Evaluation* seed : seeds) {
            SimplexOutcome best = nelder_mead(objective, seed->q, inverse.initial_simplex_step,
                                              inverse.simplex_tolerance, tol,
                                              inverse.max_simplex_iterations);
            double step = inverse.simplex_tolerance;
            for (int pass = 0; pass < inverse.polish_passes && best.value > tol; ++pass) {
                const SimplexOutcome polished = nelder_mead(objective, best.best, step, step * 1e-3, tol,
                                                            inverse.max_simplex_iterations);
                if (polished.value < best.value) best = polished;
                step *= 1e-3;
            }
            Evaluation refined = evaluate(best.best, &out.log);
            refined.q = Vec2(wrap_angle(best.best[0]), wrap_angle(best.best[1]));
            if (refined.forward) candidates.push_back(std::move(refined));
        }
    }
    if (candidates.empty()) {
        // Every refinement failed; fall back to the best grid sample.
        for (const Evaluation& e : grid) {
            if (e.forward) candidates.push_back(e);
        }
    }
    if (candidates.empty()) {
        throw DivergenceError("invert_controls: forward model failed at every probed configuration");
    }

    std::vector<const Evaluation*> solutions;
    for (const Evaluation& c : candidates) {
        if (c.objective <= tol) solutions.push_back(&c);
    }
    for (std::size_t a = 0; a < solutions.size(); ++a) {
        bool distinct = true;
        for (std::size_t b = 0; b < a; ++b) {
            if (periodic_distance(solutions[a]->q, solutions[b]->q) < 1e-2) {
                distinct = false;
                break;
            }
        }
        if (distinct) ++out.solution_count;
    }

    const Evaluation* chosen = nullptr;
    if (!solutions.empty()) {
        for (const Evaluation* s : solutions) {
            if (!chosen || lex_less(s->q, chosen->q)) chosen = s;
        }
    } else {
        for (const Evaluation& c : candidates) {
            if (!chosen || c.objective < chosen->objective ||
                (c.objective == chosen->objective && lex_less(c.q, chosen->q))) {
                chosen = &c;
            }
        }
    }

    out.theta1 = wrap_angle(chosen->q[0]);
    out.theta2 = wrap_angle(chosen->q[1]);
    out.forward = *chosen->forward;
    out.position_error = chosen->position_error;
    out.objective = chosen->objective;
    return out;
}

}  // namespace magbeam::equilibrium
