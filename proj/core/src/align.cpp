#include "nasal/align.hpp"

#include "nasal/errors.hpp"
#include "nasal/resample.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace nasal {

namespace {

double skewness(const std::vector<Vec3>& pts, const Vec3& center, const Vec3& axis) {
    double m2 = 0.0, m3 = 0.0;
    for (const auto& p : pts) {
        double t = (p - center).dot(axis);
        m2 += t * t;
        m3 += t * t * t;
    }
    double n = static_cast<double>(pts.size());
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

}  // namespace

DepthGrid transform_grid(const DepthGrid& grid, const RigidPose& pose) {
    auto pts = grid.valid_points();
    for (auto& p : pts) p = pose.apply(p);
    return resample_points(pts, grid.resolution);
}

AlignResult iterative_pca_align(const DepthGrid& grid, int max_iter, double tol_deg) {
    if (max_iter < 1) throw Error("max_iter must be >= 1");
    if (!grid.well_formed()) throw DegenerateInputError("malformed grid");

    AlignResult result;
    result.grid = grid;
    result.pose = RigidPose::identity();

    double tol_rad = tol_deg * M_PI / 180.0;

    for (int it = 0; it < max_iter; ++it) {
        auto pts = result.grid.valid_points();
        if (pts.size() < 16) throw DegenerateInputError("too few valid pixels to align");

        Vec3 c = Vec3::Zero();
        for (const auto& p : pts) c += p;
        c /= static_cast<double>(pts.size());

        Mat3 cov = Mat3::Zero();
        for (const auto& p : pts) {
            Vec3 d = p - c;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(pts.size());

        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        Vec3 zc = eig.eigenvectors().col(0);  // least variance
        Vec3 yc = eig.eigenvectors().col(2);  // greatest variance

        double skew = skewness(pts, c, zc);
        if (std::abs(skew) > 0.05) {
            if (skew < 0.0) zc = -zc;
        } else if (zc.z() < 0.0) {
            zc = -zc;
        }
        // Remove any y component along z (numerically they are orthogonal
        // already), then fix sign by continuity.
        yc -= yc.dot(zc) * zc;
        yc.normalize();
        if (yc.y() < 0.0) yc = -yc;
        Vec3 xc = yc.cross(zc);

        Mat3 rot;
        rot.row(0) = xc.transpose();
        rot.row(1) = yc.transpose();
        rot.row(2) = zc.transpose();

        RigidPose step{rot, c - rot * c};
        result.iterations = it + 1;
        if (step.angle() < tol_rad) {
            result.converged = true;
            break;
        }

        result.pose = step.compose(result.pose);
        result.grid = transform_grid(result.grid, step);
    }

    return result;
}

}  // namespace nasal
