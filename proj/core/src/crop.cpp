#include "nasal/crop.hpp"

#include "nasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nasal {

Vec3 estimate_tip(const DepthGrid& grid) {
    Eigen::Index best_r = -1, best_c = -1;
    double best_z = -std::numeric_limits<double>::max();
    std::vector<double> depths;
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (!grid.mask(r, c)) continue;
            depths.push_back(grid.nz(r, c));
            if (grid.nz(r, c) > best_z) {
                best_z = grid.nz(r, c);
                best_r = r;
                best_c = c;
            }
        }
    }
    if (best_r < 0) throw DegenerateInputError("no valid pixels");

    std::size_t k = static_cast<std::size_t>(0.98 * static_cast<double>(depths.size() - 1));
    std::nth_element(depths.begin(), depths.begin() + static_cast<long>(k), depths.end());
    double thresh = depths[k];

    // Flood fill the blob of >= 98th-percentile pixels containing the maximum.
    MaskMatrix seen = MaskMatrix::Zero(grid.rows(), grid.cols());
    std::vector<std::pair<Eigen::Index, Eigen::Index>> stack{{best_r, best_c}};
    seen(best_r, best_c) = 1;
    double sx = 0.0, sy = 0.0;
    long n = 0;
    while (!stack.empty()) {
        auto [r, c] = stack.back();
        stack.pop_back();
        sx += grid.x(c);
        sy += grid.y(r);
        ++n;
        const Eigen::Index dr[4] = {1, -1, 0, 0};
        const Eigen::Index dc[4] = {0, 0, 1, -1};
        for (int k4 = 0; k4 < 4; ++k4) {
            Eigen::Index rr = r + dr[k4], cc = c + dc[k4];
            if (rr < 0 || rr >= grid.rows() || cc < 0 || cc >= grid.cols()) continue;
            if (seen(rr, cc) || !grid.mask(rr, cc) || grid.nz(rr, cc) < thresh) continue;
            seen(rr, cc) = 1;
            stack.emplace_back(rr, cc);
        }
    }
    double cx = sx / static_cast<double>(n);
    double cy = sy / static_cast<double>(n);
    auto z = grid.sample(cx, cy);
    return Vec3(cx, cy, z.value_or(best_z));
}

DepthGrid crop_nose(const DepthGrid& grid, const Vec3& tip, const CropParams& params,
                    std::optional<Vec3> root_estimate) {
    if (!grid.in_bounds(tip.x(), tip.y())) throw Error("tip estimate outside grid bounds");

    double y_lo = tip.y() - params.below_tip_mm;
    double y_hi = root_estimate ? root_estimate->y() + params.above_root_mm
                                : tip.y() + params.above_tip_mm;
    double r2 = params.radius_mm * params.radius_mm;

    Eigen::Index before = grid.valid_count();
    Eigen::Index kept = 0;
    Eigen::Index rmin = grid.rows(), rmax = -1, cmin = grid.cols(), cmax = -1;
    MaskMatrix keep = MaskMatrix::Zero(grid.rows(), grid.cols());
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        double py = grid.y(r);
        if (py < y_lo || py > y_hi) continue;
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (!grid.mask(r, c)) continue;
            double dx = grid.x(c) - tip.x();
            double dz = grid.nz(r, c) - tip.z();
            if (dx * dx + dz * dz > r2) continue;
            keep(r, c) = 1;
            ++kept;
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            cmin = std::min(cmin, c);
            cmax = std::max(cmax, c);
        }
    }
    if (kept == 0 || static_cast<double>(kept) < 0.05 * static_cast<double>(before))
        throw DegenerateInputError("nose crop removed more than 95% of valid pixels");

    DepthGrid out = make_grid(grid.x(cmin), grid.y(rmin), grid.resolution,
                              rmax - rmin + 1, cmax - cmin + 1);
    for (Eigen::Index r = rmin; r <= rmax; ++r)
        for (Eigen::Index c = cmin; c <= cmax; ++c)
            if (keep(r, c)) {
                out.nz(r - rmin, c - cmin) = grid.nz(r, c);
                out.mask(r - rmin, c - cmin) = 1;
            }
    return out;
}

}  // namespace nasal
