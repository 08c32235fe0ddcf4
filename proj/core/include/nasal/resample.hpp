#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/geometry.hpp"

#include <vector>

namespace nasal {

/// Resamples scattered 3D points to a uniform grid by Delaunay triangulation
/// of (x, y) and piecewise-linear interpolation of z. Grid nodes lie on
/// multiples of `resolution_mm`; pixels outside the convex hull stay invalid.
///
/// Throws DegenerateInputError for degenerate clouds (collinear points, or an
/// extent smaller than one pixel).
DepthGrid resample_to_grid(const PointCloud& cloud, double resolution_mm);

/// Same, from a bare point list (used when re-resampling rotated grids).
DepthGrid resample_points(const std::vector<Vec3>& points, double resolution_mm);

}  // namespace nasal
