#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "magbeam/errors.hpp"
#include "magbeam/workspace.hpp"

namespace magbeam::workspace {

namespace {

using Mat2 = Eigen::Matrix2d;

Mat2 rotation(double angle) {
    Mat2 r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

// Root of (r0 z0 / (s + r0))^2 + (z1 / (s + 1))^2 - 1 on the bracket that
// contains the multiplier of the closest point (first-quadrant point, e0 >= e1).
double bisect_multiplier(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 1100; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (g > 0.0) {
            s0 = s;
        } else if (g < 0.0) {
            s1 = s;
        } else {
            break;
        }
    }
    return s;
}

// Closest point for an axis-aligned ellipse with semi-axes e0 >= e1 and y in the first quadrant.
Vec2 closest_first_quadrant(double e0, double e1, double y0, double y1) {
    // A y1 too small to move the lower bracket z1 - 1 off -1 is treated as zero;
    // the bisection would otherwise divide by s + 1 = 0.
    if (y1 > 0.0 && y1 / e1 - 1.0 > -1.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return {y0, y1};
            const double r0 = (e0 / e1) * (e0 / e1);
            const double s = bisect_multiplier(r0, z0, z1, g);
            return {r0 * y0 / (s + r0), y1 / (s + 1.0)};
        }
        return {0.0, e1};
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        return {e0 * xde0, e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0))};
    }
    return {e0, 0.0};
}

}  // namespace

Vec2 Ellipse::point_at(double t) const {
    return center + rotation(orientation) * Vec2(a * std::cos(t), b * std::sin(t));
}

Vec2 closest_point_on_ellipse(const Ellipse& e, const Vec2& p) {
    require(e.a >= e.b && e.b > 0.0, "closest_point_on_ellipse: need a >= b > 0");
    const Mat2 r = rotation(e.orientation);
    const Vec2 local = r.transpose() * (p - e.center);
    const Vec2 q = closest_first_quadrant(e.a, e.b, std::abs(local.x()), std::abs(local.y()));
    const Vec2 signed_q(std::copysign(q.x(), local.x()), std::copysign(q.y(), local.y()));
    return e.center + r * signed_q;
}

double distance_to_ellipse(const Ellipse& e, const Vec2& p) {
    return (closest_point_on_ellipse(e, p) - p).norm();
}

EllipseFit fit_ellipse(const std::vector<Vec2>& points) {
    require(points.size() >= 6, "fit_ellipse: need at least 6 points");
    for (const auto& p : points) require(p.allFinite(), "fit_ellipse: non-finite point");

    // Normalize to zero mean and unit RMS radius for conditioning.
    const auto n = static_cast<Eigen::Index>(points.size());
    Vec2 mean = Vec2::Zero();
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(n);
    double scale = 0.0;
    for (const auto& p : points) scale += (p - mean).squaredNorm();
    scale = std::sqrt(scale / static_cast<double>(n));
    require(scale > 0.0, "fit_ellipse: all points coincide");

    Eigen::MatrixX2d centered(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) centered.row(i) = ((points[i] - mean) / scale).transpose();
    const Eigen::JacobiSVD<Eigen::MatrixX2d> svd(centered);
    require(svd.singularValues()(1) > 1e-9 * svd.singularValues()(0), "fit_ellipse: points are collinear");

    Eigen::MatrixX3d d1(n, 3);
    Eigen::MatrixX3d d2(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = centered(i, 0);
        const double y = centered(i, 1);
        d1.row(i) << x * x, x * y, y * y;
        d2.row(i) << x, y, 1.0;
    }
    const Mat3 s1 = d1.transpose() * d1;
    const Mat3 s2 = d1.transpose() * d2;
    const Mat3 s3 = d2.transpose() * d2;
    const Eigen::FullPivLU<Mat3> s3_lu(s3);
    require(s3_lu.isInvertible(), "fit_ellipse: degenerate point configuration");
    const Mat3 t = -s3_lu.solve(s2.transpose());
    const Mat3 m = s1 + s2 * t;
    // Premultiply by the inverse of the ellipse constraint matrix C1 = [[0,0,2],[0,-1,0],[2,0,0]].
    Mat3 reduced;
    reduced.row(0) = 0.5 * m.row(2);
    reduced.row(1) = -m.row(1);
    reduced.row(2) = 0.5 * m.row(0);

    const Eigen::EigenSolver<Mat3> eig(reduced);
    Vec3 a1 = Vec3::Zero();
    double best_constraint = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Vec3 v = eig.eigenvectors().col(k).real();
        const double constraint = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (constraint > best_constraint) {
            best_constraint = constraint;
            a1 = v;
        }
    }
    if (!(best_constraint > 0.0)) throw std::domain_error("fit_ellipse: no elliptical solution");
    const Vec3 a2 = t * a1;

    const double A = a1(0), B = a1(1), C = a1(2), D = a2(0), E = a2(1), F = a2(2);
    const double disc = B * B - 4.0 * A * C;
    if (!(disc < 0.0)) throw std::domain_error("fit_ellipse: fitted conic is not an ellipse");

    Eigen::Matrix2d q;
    q << A, 0.5 * B, 0.5 * B, C;
    const Vec2 c = q.ldlt().solve(Vec2(-0.5 * D, -0.5 * E));
    const double f0 = F + 0.5 * (D * c.x() + E * c.y());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qe(q);
    const double l0 = qe.eigenvalues()(0);
    const double l1 = qe.eigenvalues()(1);
    const double ax0 = -f0 / l0;
    const double ax1 = -f0 / l1;
    if (!(ax0 > 0.0 && ax1 > 0.0)) throw std::domain_error("fit_ellipse: fitted conic is imaginary");

    // Major axis goes with the eigenvalue of smallest magnitude.
    const bool first_is_major = std::abs(l0) < std::abs(l1);
    const Vec2 major_dir = qe.eigenvectors().col(first_is_major ? 0 : 1);
    Ellipse e;
    e.a = std::sqrt(first_is_major ? ax0 : ax1) * scale;
    e.b = std::sqrt(first_is_major ? ax1 : ax0) * scale;
    e.center = mean + scale * c;
    double angle = std::atan2(major_dir.y(), major_dir.x());
    if (angle <= -std::numbers::pi / 2) angle += std::numbers::pi;
    if (angle > std::numbers::pi / 2) angle -= std::numbers::pi;
    e.orientation = angle;

    std::vector<double> squared;
    squared.reserve(points.size());
    for (const auto& p : points) {
        const double d = distance_to_ellipse(e, p);
        squared.push_back(d * d);
    }
    return {e, std::sqrt(pairwise_sum(squared) / static_cast<double>(points.size()))};
}

}  // namespace magbeam::workspace
