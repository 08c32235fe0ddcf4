#pragma once

#include "nasal/depth_grid.hpp"

namespace nasal {

/// Median filter over a physical window. The window is converted to pixels by
/// rounding mm/resolution up to the nearest odd count per axis. Each valid
/// output pixel becomes the median of the valid pixels in its window; invalid
/// pixels stay invalid. Coordinate maps are untouched.
///
/// Throws DegenerateInputError if the converted window exceeds the grid.
DepthGrid median_filter(const DepthGrid& grid, double width_mm, double height_mm);

inline DepthGrid median_filter(const DepthGrid& grid, double mask_mm) {
    return median_filter(grid, mask_mm, mask_mm);
}

}  // namespace nasal
