#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/geometry.hpp"

namespace nasal {

struct AlignResult {
    DepthGrid grid;
    RigidPose pose;  // maps input-frame coordinates to aligned-frame coordinates
    bool converged = false;
    int iterations = 0;
};

/// Iterative PCA pose normalization. Each pass takes the PCA axes of the valid
/// 3D points, maps least-variance -> +z and greatest -> +y, rotates about the
/// centroid and re-resamples, until the incremental rotation angle drops below
/// `tol_deg` or `max_iter` passes ran. Non-convergence is reported through the
/// flag, not an error.
///
/// Axis signs: +z by positive skewness of the depth distribution (protrusion
/// toward the sensor), falling back to continuity with the current frame when
/// the skewness is negligible; +y by continuity; x = y × z.
AlignResult iterative_pca_align(const DepthGrid& grid, int max_iter, double tol_deg);

/// Applies a rigid transform to the valid pixels and re-resamples at the same
/// resolution.
DepthGrid transform_grid(const DepthGrid& grid, const RigidPose& pose);

}  // namespace nasal
