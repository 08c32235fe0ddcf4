#include "nasal/resample.hpp"

#include "nasal/delaunay.hpp"
#include "nasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nasal {

DepthGrid resample_points(const std::vector<Vec3>& points, double resolution_mm) {
    if (resolution_mm <= 0.0) throw Error("resolution must be positive");
    if (points.size() < 3) throw DegenerateInputError("too few points to resample");

    double minx = std::numeric_limits<double>::max(), maxx = -minx;
    double miny = minx, maxy = -minx;
    for (const auto& p : points) {
        minx = std::min(minx, p.x());
        maxx = std::max(maxx, p.x());
        miny = std::min(miny, p.y());
        maxy = std::max(maxy, p.y());
    }

    // Grid nodes on multiples of the resolution, restricted to the data extent.
    double x0 = std::ceil(minx / resolution_mm - 1e-9) * resolution_mm;
    double y0 = std::ceil(miny / resolution_mm - 1e-9) * resolution_mm;
    auto cols = static_cast<Eigen::Index>(std::floor((maxx - x0) / resolution_mm + 1e-9)) + 1;
    auto rows = static_cast<Eigen::Index>(std::floor((maxy - y0) / resolution_mm + 1e-9)) + 1;
    if (rows < 2 || cols < 2)
        throw DegenerateInputError("cloud extent smaller than one pixel at this resolution");

    std::vector<Vec2> sites;
    sites.reserve(points.size());
    for (const auto& p : points) sites.emplace_back(p.x(), p.y());
    Delaunay2D tri(sites);  // throws on collinear input

    DepthGrid grid = make_grid(x0, y0, resolution_mm, rows, cols);

    // Rasterize each triangle over the grid nodes it covers; barycentric
    // interpolation of z. Shared edges get written twice with equal values.
    for (const auto& t : tri.triangles()) {
        const Vec3& a = points[static_cast<std::size_t>(t[0])];
        const Vec3& b = points[static_cast<std::size_t>(t[1])];
        const Vec3& c = points[static_cast<std::size_t>(t[2])];
        double area2 = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
        if (area2 <= 0.0) continue;  // degenerate sliver

        double tminx = std::min({a.x(), b.x(), c.x()});
        double tmaxx = std::max({a.x(), b.x(), c.x()});
        double tminy = std::min({a.y(), b.y(), c.y()});
        double tmaxy = std::max({a.y(), b.y(), c.y()});
        auto c0 = static_cast<Eigen::Index>(std::ceil((tminx - x0) / resolution_mm - 1e-12));
        auto c1 = static_cast<Eigen::Index>(std::floor((tmaxx - x0) / resolution_mm + 1e-12));
        auto r0 = static_cast<Eigen::Index>(std::ceil((tminy - y0) / resolution_mm - 1e-12));
        auto r1 = static_cast<Eigen::Index>(std::floor((tmaxy - y0) / resolution_mm + 1e-12));
        c0 = std::max<Eigen::Index>(c0, 0);
        r0 = std::max<Eigen::Index>(r0, 0);
        c1 = std::min(c1, cols - 1);
        r1 = std::min(r1, rows - 1);

        double tol = 1e-12 * std::abs(area2) + 1e-300;
        for (Eigen::Index r = r0; r <= r1; ++r) {
            double py = grid.y(r);
            for (Eigen::Index col = c0; col <= c1; ++col) {
                double px = grid.x(col);
                double w0 = (b.x() - px) * (c.y() - py) - (b.y() - py) * (c.x() - px);
                double w1 = (c.x() - px) * (a.y() - py) - (c.y() - py) * (a.x() - px);
                double w2 = area2 - w0 - w1;
                if (w0 < -tol || w1 < -tol || w2 < -tol) continue;
                double z = (w0 * a.z() + w1 * b.z() + w2 * c.z()) / area2;
                grid.nz(r, col) = z;
                grid.mask(r, col) = 1;
            }
        }
    }

    if (grid.valid_count() == 0) throw DegenerateInputError("resampling produced no valid pixels");
    return grid;
}

DepthGrid resample_to_grid(const PointCloud& cloud, double resolution_mm) {
    auto pts = cloud.valid_points();
    if (pts.size() < 3 || !cloud.well_formed())
        throw DegenerateInputError("cloud is degenerate (needs >= 3 finite, non-collinear points)");
    return resample_points(pts, resolution_mm);
}

}  // namespace nasal
