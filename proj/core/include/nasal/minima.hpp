#pragma once

#include "nasal/geometry.hpp"

#include <vector>

namespace nasal {

/// Result of the rotated-curve minima search.
struct MinimaResult {
    /// n x 2: (abscissa, height) of the selected minima on the ORIGINAL curve,
    /// each row an exact sample of the input. Sorted ascending by the height
    /// the points had in the rotated frame.
    Eigen::MatrixX2d min;
    std::vector<Eigen::Index> indices;  // sample indices into the input curve
    double rotation_used = 0.0;         // alpha, radians
    bool shortfall = false;             // fewer than n minima existed
};

/// Finds the n lowest local minima of the curve after an in-chart rotation by
/// `alpha` (counter-clockwise, pivoted on the first sample). Minima are strict
/// sign changes of the first-order difference of the rotated heights, sorted
/// by rotated height (ties: smaller abscissa), then mapped back to the
/// original samples. If fewer than n exist, all found are returned with the
/// shortfall flag set.
///
/// Throws Error when the rotated abscissas are not strictly increasing (alpha
/// too large for this curve).
MinimaResult minima_detector(const PlanarCurve& curve, int n, double alpha);

}  // namespace nasal
