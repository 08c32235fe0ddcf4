#include "nasal/profile.hpp"

#include "nasal/errors.hpp"

#include <cmath>
#include <vector>

namespace nasal {

PlanarCurve plane_intersect(const DepthGrid& grid, const Vec3& anchor, const Vec2& normal_xy) {
    double nn = normal_xy.norm();
    if (nn < 1e-12) throw Error("plane normal must be nonzero");
    if (!grid.in_bounds(anchor.x(), anchor.y())) throw Error("anchor outside grid bounds");

    Vec2 d(-normal_xy.y() / nn, normal_xy.x() / nn);

    // Parameter range of the line inside the grid bounding box.
    double smin = -std::numeric_limits<double>::max();
    double smax = std::numeric_limits<double>::max();
    auto clip = [&](double origin, double dir, double lo, double hi) {
        if (std::abs(dir) < 1e-15) return origin >= lo && origin <= hi;
        double s0 = (lo - origin) / dir;
        double s1 = (hi - origin) / dir;
        if (s0 > s1) std::swap(s0, s1);
        smin = std::max(smin, s0);
        smax = std::min(smax, s1);
        return true;
    };
    if (!clip(anchor.x(), d.x(), grid.x0, grid.x_max()) ||
        !clip(anchor.y(), d.y(), grid.y0, grid.y_max()))
        throw DegenerateInputError("cutting line misses the grid");

    double res = grid.resolution;
    auto k0 = static_cast<long>(std::ceil(smin / res - 1e-9));
    auto k1 = static_cast<long>(std::floor(smax / res + 1e-9));

    std::vector<double> ss, zz;
    ss.reserve(static_cast<std::size_t>(std::max<long>(0, k1 - k0 + 1)));
    for (long k = k0; k <= k1; ++k) {
        double s = static_cast<double>(k) * res;
        double px = anchor.x() + s * d.x();
        double py = anchor.y() + s * d.y();
        if (auto z = grid.sample(px, py)) {
            ss.push_back(s);
            zz.push_back(*z);
        }
    }
    if (ss.size() < 2) throw DegenerateInputError("fewer than 2 valid samples on cutting plane");

    PlanarCurve curve;
    curve.p.resize(static_cast<Eigen::Index>(ss.size()), 2);
    for (std::size_t i = 0; i < ss.size(); ++i) {
        curve.p(static_cast<Eigen::Index>(i), 0) = ss[i];
        curve.p(static_cast<Eigen::Index>(i), 1) = zz[i];
    }
    auto za = grid.sample(anchor.x(), anchor.y());
    curve.origin3d = Vec3(anchor.x(), anchor.y(), za.value_or(anchor.z()));
    curve.direction = d;
    return curve;
}

PlanarCurve half_curve(const PlanarCurve& curve, double pivot_abscissa, bool positive_side,
                       bool include_pivot) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        double s = curve.abscissa(i);
        double rel = s - pivot_abscissa;
        if (positive_side ? (rel > 1e-12 || (include_pivot && rel > -1e-12))
                          : (rel < -1e-12 || (include_pivot && rel < 1e-12)))
            idx.push_back(i);
    }
    if (idx.size() < 2) throw DegenerateInputError("half curve has fewer than 2 samples");

    PlanarCurve out;
    out.p.resize(static_cast<Eigen::Index>(idx.size()), 2);
    if (positive_side) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.p(static_cast<Eigen::Index>(i), 0) = curve.abscissa(idx[i]) - pivot_abscissa;
            out.p(static_cast<Eigen::Index>(i), 1) = curve.height(idx[i]);
        }
        out.direction = curve.direction;
    } else {
        // Mirror so the abscissa increases outward from the pivot.
        for (std::size_t i = 0; i < idx.size(); ++i) {
            std::size_t j = idx.size() - 1 - i;
            out.p(static_cast<Eigen::Index>(i), 0) = pivot_abscissa - curve.abscissa(idx[j]);
            out.p(static_cast<Eigen::Index>(i), 1) = curve.height(idx[j]);
        }
        out.direction = -curve.direction;
    }
    out.origin3d = Vec3(curve.origin3d.x() + pivot_abscissa * curve.direction.x(),
                        curve.origin3d.y() + pivot_abscissa * curve.direction.y(),
                        curve.origin3d.z());
    return out;
}

}  // namespace nasal
