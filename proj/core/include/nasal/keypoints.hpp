#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/landmarks.hpp"

#include <vector>

namespace nasal {

/// Number of parts each half-segment of the landmark frame is divided into
/// (1 = no interior points). The default 3/3/3 yields the 19-point grid:
/// 7 landmarks + 2 interior points on each of the six half-segments
/// L2-L1, L1-L7, L3-L4, L4-L6, L1-L4, L4-L5.
struct SubdivisionSpec {
    int root_row_parts = 3;
    int alar_row_parts = 3;
    int ridge_parts = 3;

    bool valid() const { return root_row_parts >= 1 && alar_row_parts >= 1 && ridge_parts >= 1; }
};

/// Keypoints derived from the landmark frame by segment subdivision, each
/// projected onto the surface (z replaced by the interpolated depth). Points
/// whose projection lands on an invalid pixel are dropped; ids stay stable
/// because they index the full subdivision ordering.
struct KeypointGrid {
    std::vector<Vec3> points;
    std::vector<int> ids;
    int dropped = 0;

    std::size_t size() const { return points.size(); }
};

KeypointGrid build_keypoint_grid(const LandmarkSet& landmarks, const DepthGrid& surface,
                                 const SubdivisionSpec& spec = {});

}  // namespace nasal
