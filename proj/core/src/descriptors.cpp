#include "nasal/descriptors.hpp"

#include "nasal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nasal {

const char* to_string(DescriptorKind kind) {
    return kind == DescriptorKind::spherical_patches ? "patches" : "curves";
}

DescriptorKind descriptor_kind_from_string(const std::string& s) {
    if (s == "patches" || s == "spherical_patches") return DescriptorKind::spherical_patches;
    if (s == "curves" || s == "nasal_curves") return DescriptorKind::nasal_curves;
    throw Error("unknown descriptor kind: " + s);
}

DescriptorSet spherical_patches(const KeypointGrid& grid, const DepthGrid& surface,
                                double radius_mm) {
    if (radius_mm <= 0.0) throw Error("patch radius must be positive");
    DescriptorSet set;
    set.kind = DescriptorKind::spherical_patches;
    set.regions.resize(grid.size());

    double r2 = radius_mm * radius_mm;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec3& center = grid.points[k];
        // Pixels beyond the xy radius cannot be inside the sphere.
        Eigen::Index r0, c0, r1, c1;
        surface.nearest(center.x() - radius_mm, center.y() - radius_mm, r0, c0);
        surface.nearest(center.x() + radius_mm, center.y() + radius_mm, r1, c1);
        for (Eigen::Index r = r0; r <= r1; ++r)
            for (Eigen::Index c = c0; c <= c1; ++c) {
                if (!surface.mask(r, c)) continue;
                if ((surface.point(r, c) - center).squaredNorm() <= r2)
                    set.regions[k].emplace_back(r, c);
            }
    }
    return set;
}

std::vector<std::pair<int, int>> default_curve_pairs() {
    const int ids[] = {0, 1, 2, 4, 5, 6};  // L1, L2, L3, L5, L6, L7
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) pairs.emplace_back(ids[i], ids[j]);
    return pairs;
}

DescriptorSet nasal_curves(const KeypointGrid& grid, const DepthGrid& surface,
                           const std::vector<std::pair<int, int>>& id_pairs) {
    DescriptorSet set;
    set.kind = DescriptorKind::nasal_curves;
    set.regions.resize(id_pairs.size());

    for (std::size_t k = 0; k < id_pairs.size(); ++k) {
        auto [ia, ib] = id_pairs[k];
        // Resolve stable ids to surviving keypoints; a dropped endpoint leaves
        // the region empty rather than shifting K.
        const Vec3* a = nullptr;
        const Vec3* b = nullptr;
        for (std::size_t i = 0; i < grid.ids.size(); ++i) {
            if (grid.ids[i] == ia) a = &grid.points[i];
            if (grid.ids[i] == ib) b = &grid.points[i];
        }
        if (!a || !b) continue;

        Vec2 d(b->x() - a->x(), b->y() - a->y());
        double len = d.norm();
        if (len < 1e-9) throw Error("nasal_curves: xy-coincident landmark pair");
        d /= len;

        for (double s = 0.0; s <= len + 1e-9; s += surface.resolution) {
            double px = a->x() + s * d.x();
            double py = a->y() + s * d.y();
            if (!surface.sample(px, py)) continue;  // off-surface sample
            Eigen::Index r, c;
            surface.nearest(px, py, r, c);
            if (surface.mask(r, c)) set.regions[k].emplace_back(r, c);
        }
    }
    return set;
}

}  // namespace nasal
