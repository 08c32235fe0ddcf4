#include "nasal/median_filter.hpp"

#include "nasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nasal {

namespace {

Eigen::Index odd_window(double extent_mm, double resolution) {
    if (extent_mm <= 0.0) throw Error("median filter window must be positive");
    auto px = static_cast<Eigen::Index>(std::ceil(extent_mm / resolution));
    if (px % 2 == 0) ++px;
    return px;
}

}  // namespace

DepthGrid median_filter(const DepthGrid& grid, double width_mm, double height_mm) {
    Eigen::Index wx = odd_window(width_mm, grid.resolution);
    Eigen::Index wy = odd_window(height_mm, grid.resolution);
    if (wx > grid.cols() || wy > grid.rows())
        throw DegenerateInputError("median window larger than grid");

    Eigen::Index hx = wx / 2;
    Eigen::Index hy = wy / 2;

    DepthGrid out = grid;
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(wx * wy));
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (!grid.mask(r, c)) continue;
            window.clear();
            Eigen::Index r0 = std::max<Eigen::Index>(0, r - hy);
            Eigen::Index r1 = std::min(grid.rows() - 1, r + hy);
            Eigen::Index c0 = std::max<Eigen::Index>(0, c - hx);
            Eigen::Index c1 = std::min(grid.cols() - 1, c + hx);
            for (Eigen::Index rr = r0; rr <= r1; ++rr)
                for (Eigen::Index cc = c0; cc <= c1; ++cc)
                    if (grid.mask(rr, cc)) window.push_back(grid.nz(rr, cc));
            // The center pixel is valid, so the window is never empty.
            std::size_t mid = window.size() / 2;
            std::nth_element(window.begin(), window.begin() + static_cast<long>(mid), window.end());
            double med = window[mid];
            if (window.size() % 2 == 0) {
                // Even count: average the two middle values.
                double lower = *std::max_element(window.begin(), window.begin() + static_cast<long>(mid));
                med = 0.5 * (med + lower);
            }
            out.nz(r, c) = med;
        }
    }
    return out;
}

}  // namespace nasal
