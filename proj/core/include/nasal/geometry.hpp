#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <vector>

namespace nasal {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unstructured 3D scan, millimetres. `valid[i] == 0` marks points that the
/// scanner flagged as bad; they are kept so indices line up with the source.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<std::uint8_t> valid;  // empty = all valid

    std::size_t size() const { return points.size(); }

    bool is_valid(std::size_t i) const { return valid.empty() || valid[i] != 0; }

    std::size_t valid_count() const {
        if (valid.empty()) return points.size();
        std::size_t n = 0;
        for (auto v : valid) n += (v != 0);
        return n;
    }

    std::vector<Vec3> valid_points() const {
        std::vector<Vec3> out;
        out.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            if (is_valid(i)) out.push_back(points[i]);
        return out;
    }

    /// All finite, and at least 3 non-collinear valid points.
    bool well_formed() const;
};

/// Proper rigid transform: x -> rotation * x + translation.
struct RigidPose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    /// this ∘ other: apply `other` first, then this.
    RigidPose compose(const RigidPose& other) const {
        return RigidPose{rotation * other.rotation, rotation * other.translation + translation};
    }

    RigidPose inverse() const {
        return RigidPose{rotation.transpose(), -(rotation.transpose() * translation)};
    }

    /// Rotation angle in radians, in [0, pi].
    double angle() const {
        double c = (rotation.trace() - 1.0) / 2.0;
        return std::acos(std::clamp(c, -1.0, 1.0));
    }

    /// det(R) == +1 and R^T R == I within tol.
    bool orthonormal(double tol = 1e-9) const {
        return std::abs(rotation.determinant() - 1.0) < tol &&
               (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < tol;
    }

    static RigidPose identity() { return RigidPose{}; }

    /// Roll rotation (about the z axis) by `angle_rad` around `pivot`.
    static RigidPose roll_about(double angle_rad, const Vec3& pivot) {
        Mat3 r = Eigen::AngleAxisd(angle_rad, Vec3::UnitZ()).toRotationMatrix();
        return RigidPose{r, pivot - r * pivot};
    }
};

/// Single-valued profile curve in a vertical cutting plane.
/// Column 0: signed in-plane distance from the anchor (mm), strictly
/// increasing. Column 1: surface height z (mm).
struct PlanarCurve {
    Eigen::MatrixX2d p;
    Vec3 origin3d = Vec3::Zero();    // 3D anchor of the cutting plane
    Vec2 direction = Vec2(0.0, 1.0); // in-plane (xy) unit direction of +abscissa

    Eigen::Index size() const { return p.rows(); }
    double abscissa(Eigen::Index i) const { return p(i, 0); }
    double height(Eigen::Index i) const { return p(i, 1); }

    /// 3D location of sample i on the original surface.
    Vec3 point3d(Eigen::Index i) const {
        return Vec3(origin3d.x() + p(i, 0) * direction.x(),
                    origin3d.y() + p(i, 0) * direction.y(), p(i, 1));
    }
};

}  // namespace nasal
