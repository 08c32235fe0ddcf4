#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/gabor.hpp"

#include <vector>

namespace nasal {

/// Per-scale unit normal fields of the graphs (Nx, Ny, NGm_s).
struct GaborNormalStack {
    struct Scale {
        Eigen::MatrixXd nx, ny, nz;  // unit length at every valid pixel
        Eigen::MatrixXd magnitude;   // the NGm map the normals came from
        MaskMatrix confident;
    };
    std::vector<Scale> scales;
    MaskMatrix valid;
    double resolution = 0.5;  // mm/pixel of the source grid

    int scale_count() const { return static_cast<int>(scales.size()); }
};

/// Unit surface normals of a height field z over the physical (mm) lattice:
/// central differences inside, one-sided at boundaries/holes, normal
/// direction (-dz/dx, -dz/dy, 1) normalized. The z component is always
/// positive.
void height_field_normals(const Eigen::MatrixXd& z, const MaskMatrix& valid, double resolution_mm,
                          Eigen::MatrixXd& nx, Eigen::MatrixXd& ny, Eigen::MatrixXd& nz);

/// Normal fields for every scale of the orientation-max maps.
GaborNormalStack scale_normals(const DepthGrid& grid, const GaborScaleMaps& maps);

}  // namespace nasal
