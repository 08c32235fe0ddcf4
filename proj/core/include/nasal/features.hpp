#pragma once

#include "nasal/descriptors.hpp"
#include "nasal/surface_normals.hpp"

#include <string>
#include <vector>

namespace nasal {

/// Fixed feature-vector layout: scale-major, then normal component (x, y, z),
/// then descriptor, then histogram bin:
///   index = ((scale * 3 + component) * K + descriptor) * bins + bin.
struct FeatureLayout {
    int scales = 0;
    int descriptors = 0;  // K
    int bins = 0;         // h_l
    DescriptorKind kind = DescriptorKind::spherical_patches;

    long length() const { return static_cast<long>(scales) * 3 * descriptors * bins; }
    long index(int scale, int component, int descriptor, int bin) const {
        return ((static_cast<long>(scale) * 3 + component) * descriptors + descriptor) * bins + bin;
    }
};

/// Concatenated normalized histograms. Every non-flagged per-descriptor
/// histogram is nonnegative and sums to 1; flagged (scale, descriptor) blocks
/// are all-zero across the three components.
struct FeatureVector {
    FeatureLayout layout;
    std::vector<double> values;
    std::vector<std::uint8_t> empty_flags;  // scales x K, 1 = zero histograms

    bool empty_at(int scale, int descriptor) const {
        return empty_flags[static_cast<std::size_t>(scale * layout.descriptors + descriptor)] != 0;
    }
};

/// Histograms the normal components of each scale over each region into
/// `bins` uniform bins on [-1, 1] (right-open except the last) and normalizes
/// each histogram to unit sum. Only confident pixels contribute; a region with
/// no confident pixels at some scale yields zero histograms and a flag.
FeatureVector extract_features(const GaborNormalStack& stack, const DescriptorSet& set, int bins);

/// Little-endian float32 values plus a JSON sidecar describing the layout.
void save_features(const FeatureVector& fv, const std::string& data_path,
                   const std::string& sidecar_path);
FeatureVector load_features(const std::string& data_path, const std::string& sidecar_path);

}  // namespace nasal
