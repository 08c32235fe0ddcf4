#pragma once

#include "nasal/geometry.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace nasal {

using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Uniform-resolution height field N = [Nx, Ny, Nz], millimetres.
///
/// The coordinate maps are separable and exact: Nx(r,c) = x0 + c*resolution
/// (strictly increasing along columns) and Ny(r,c) = y0 + r*resolution
/// (strictly increasing along rows). nz(r,c) is the surface height wherever
/// mask(r,c) != 0; its value at invalid pixels is unspecified.
struct DepthGrid {
    double x0 = 0.0;
    double y0 = 0.0;
    double resolution = 0.5;  // mm / pixel
    Eigen::MatrixXd nz;       // rows x cols
    MaskMatrix mask;

    Eigen::Index rows() const { return nz.rows(); }
    Eigen::Index cols() const { return nz.cols(); }

    double x(Eigen::Index c) const { return x0 + static_cast<double>(c) * resolution; }
    double y(Eigen::Index r) const { return y0 + static_cast<double>(r) * resolution; }
    double x_max() const { return x(cols() - 1); }
    double y_max() const { return y(rows() - 1); }

    bool in_bounds(double px, double py) const {
        return px >= x0 && px <= x_max() && py >= y0 && py <= y_max();
    }

    bool valid(Eigen::Index r, Eigen::Index c) const {
        return r >= 0 && r < rows() && c >= 0 && c < cols() && mask(r, c) != 0;
    }

    Eigen::Index valid_count() const;

    Vec3 point(Eigen::Index r, Eigen::Index c) const { return Vec3(x(c), y(r), nz(r, c)); }

    /// All valid pixels as 3D points, row-major order.
    std::vector<Vec3> valid_points() const;

    /// Bilinear interpolation of nz at (px, py). Requires all four enclosing
    /// pixels valid; returns nullopt otherwise (no depth is invented at holes).
    std::optional<double> sample(double px, double py) const;

    /// Nearest pixel indices for (px, py), without validity check.
    void nearest(double px, double py, Eigen::Index& r, Eigen::Index& c) const;

    /// Structural sanity: positive resolution, consistent shapes, finite nz
    /// wherever the mask is valid.
    bool well_formed() const;
};

/// Grid built from explicit geometry; nz/mask zero-initialized (all invalid).
DepthGrid make_grid(double x0, double y0, double resolution, Eigen::Index rows, Eigen::Index cols);

/// Serialize as paired CSV (nz values; "nan" at invalid pixels) plus a sidecar
/// header carrying origin, resolution and a run-length encoding of the mask.
void save_grid_csv(const DepthGrid& grid, const std::string& csv_path, const std::string& meta_path);
DepthGrid load_grid_csv(const std::string& csv_path, const std::string& meta_path);

}  // namespace nasal
