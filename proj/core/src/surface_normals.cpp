#include "nasal/surface_normals.hpp"

#include "nasal/errors.hpp"

#include <cmath>

namespace nasal {

void height_field_normals(const Eigen::MatrixXd& z, const MaskMatrix& valid, double resolution_mm,
                          Eigen::MatrixXd& nx, Eigen::MatrixXd& ny, Eigen::MatrixXd& nz) {
    const auto rows = z.rows();
    const auto cols = z.cols();
    nx = Eigen::MatrixXd::Zero(rows, cols);
    ny = Eigen::MatrixXd::Zero(rows, cols);
    nz = Eigen::MatrixXd::Zero(rows, cols);

    auto ok = [&](Eigen::Index r, Eigen::Index c) {
        return r >= 0 && r < rows && c >= 0 && c < cols && valid(r, c) != 0;
    };

    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!valid(r, c)) continue;

            double gx, gy;
            // Central differences where both neighbors exist, one-sided at
            // boundaries and next to holes, zero slope when isolated.
            if (ok(r, c - 1) && ok(r, c + 1))
                gx = (z(r, c + 1) - z(r, c - 1)) / (2.0 * resolution_mm);
            else if (ok(r, c + 1))
                gx = (z(r, c + 1) - z(r, c)) / resolution_mm;
            else if (ok(r, c - 1))
                gx = (z(r, c) - z(r, c - 1)) / resolution_mm;
            else
                gx = 0.0;

            if (ok(r - 1, c) && ok(r + 1, c))
                gy = (z(r + 1, c) - z(r - 1, c)) / (2.0 * resolution_mm);
            else if (ok(r + 1, c))
                gy = (z(r + 1, c) - z(r, c)) / resolution_mm;
            else if (ok(r - 1, c))
                gy = (z(r, c) - z(r - 1, c)) / resolution_mm;
            else
                gy = 0.0;

            // The +z augmentation keeps the length strictly positive.
            double inv = 1.0 / std::sqrt(gx * gx + gy * gy + 1.0);
            nx(r, c) = -gx * inv;
            ny(r, c) = -gy * inv;
            nz(r, c) = inv;
        }
    }
}

GaborNormalStack scale_normals(const DepthGrid& grid, const GaborScaleMaps& maps) {
    GaborNormalStack stack;
    stack.valid = maps.valid;
    stack.resolution = grid.resolution;
    stack.scales.resize(maps.ngm.size());
    for (std::size_t s = 0; s < maps.ngm.size(); ++s) {
        auto& sc = stack.scales[s];
        if (maps.ngm[s].rows() != grid.rows() || maps.ngm[s].cols() != grid.cols())
            throw Error("scale_normals: map dimensions do not match the grid");
        height_field_normals(maps.ngm[s], maps.valid, grid.resolution, sc.nx, sc.ny, sc.nz);
        sc.magnitude = maps.ngm[s];
        sc.confident = maps.confident[s];
    }
    return stack;
}

}  // namespace nasal
