#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/geometry.hpp"

namespace nasal {

/// Intersects the vertical plane through `anchor` with in-plane (xy) normal
/// `normal_xy` with the surface. The result is the profile along the line
/// through `anchor` perpendicular to the normal, sampled at grid resolution by
/// bilinear interpolation (all four corners must be valid; holes drop samples).
/// The abscissa is the signed in-plane distance from the anchor, on the
/// lattice k * resolution so the anchor itself is a candidate sample.
///
/// Throws Error for a zero normal or out-of-bounds anchor, and
/// DegenerateInputError when fewer than 2 samples survive.
PlanarCurve plane_intersect(const DepthGrid& grid, const Vec3& anchor, const Vec2& normal_xy);

/// Restriction of a curve to samples with abscissa strictly on one side of
/// `pivot_abscissa`, re-anchored so the first sample starts the outward chart.
/// `positive_side` keeps s >= pivot (ascending); otherwise s <= pivot, with the
/// abscissa negated so it still increases outward from the pivot.
PlanarCurve half_curve(const PlanarCurve& curve, double pivot_abscissa, bool positive_side,
                       bool include_pivot = true);

}  // namespace nasal
