#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/geometry.hpp"

#include <optional>

namespace nasal {

struct CropParams {
    double radius_mm = 40.0;     // vertical cylinder (axis ∥ y through the tip) radius
    double below_tip_mm = 25.0;  // keep y >= tip.y - below_tip_mm
    double above_root_mm = 15.0; // with a root estimate: keep y <= root.y + above_root_mm
    double above_tip_mm = 40.0;  // without one: keep y <= tip.y + above_tip_mm
};

/// Coarse nose tip seed: the valid pixel maximizing nz, refined as the
/// centroid of the connected blob of pixels above the 98th depth percentile.
Vec3 estimate_tip(const DepthGrid& grid);

/// Crops the nasal region around the tip: the intersection of a vertical
/// cylinder about the tip's (x, z) axis with a y band below the root estimate
/// (or a tip-relative bound when no root estimate is given). The output grid
/// is trimmed to the bounding box of the kept pixels.
///
/// Throws Error when the tip is outside the grid and DegenerateInputError when
/// the crop removes more than 95% of the valid pixels.
DepthGrid crop_nose(const DepthGrid& grid, const Vec3& tip_estimate,
                    const CropParams& params = {},
                    std::optional<Vec3> root_estimate = std::nullopt);

}  // namespace nasal
