#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/keypoints.hpp"

#include <utility>
#include <vector>

namespace nasal {

enum class DescriptorKind { spherical_patches, nasal_curves };

const char* to_string(DescriptorKind kind);
DescriptorKind descriptor_kind_from_string(const std::string& s);

/// K regions on the grid, each a list of (row, col) pixels. Patch regions are
/// pixel sets; curve regions are the nearest pixels of the curve samples (in
/// sample order, duplicates possible). Empty regions are kept so K is stable.
struct DescriptorSet {
    DescriptorKind kind = DescriptorKind::spherical_patches;
    std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> regions;

    std::size_t count() const { return regions.size(); }
};

/// One region per keypoint: the valid pixels whose 3D point lies within
/// `radius_mm` of the keypoint.
DescriptorSet spherical_patches(const KeypointGrid& grid, const DepthGrid& surface,
                                double radius_mm);

/// One region per landmark pair: the surface curve cut by the vertical plane
/// through the two points, sampled between them (inclusive) at grid
/// resolution. Throws for an xy-coincident pair.
DescriptorSet nasal_curves(const KeypointGrid& grid, const DepthGrid& surface,
                           const std::vector<std::pair<int, int>>& id_pairs);

/// The default curve set: all unordered pairs among {L1, L2, L3, L5, L6, L7}
/// (keypoint ids 0, 1, 2, 4, 5, 6).
std::vector<std::pair<int, int>> default_curve_pairs();

}  // namespace nasal
