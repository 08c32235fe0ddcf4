#pragma once

#include "nasal/features.hpp"
#include "nasal/kfa.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nasal {

/// Expands the K-bit nucleus vector to the full feature length: descriptor
/// i's h_l-sized block is all-ones iff bn[i], replicated across the three
/// normal components and every scale (identical per-scale blocks).
std::vector<std::uint8_t> expand_mask(const std::vector<std::uint8_t>& bn,
                                      const FeatureLayout& layout);

/// Keeps only the columns selected by the expanded mask (zero-out then drop).
/// An all-zero mask yields a 0-column matrix.
Eigen::MatrixXd apply_mask_and_reduce(const Eigen::MatrixXd& features,
                                      const std::vector<std::uint8_t>& bn,
                                      const FeatureLayout& layout);

/// Rank-one recognition rate of the masked KFA + Mahalanobis-cosine pipeline
/// (the GA fitness). An all-zero mask scores 0 by convention.
double masked_rank1(const Eigen::MatrixXd& gallery, const std::vector<int>& gallery_labels,
                    const Eigen::MatrixXd& probes, const std::vector<int>& probe_labels,
                    const std::vector<std::uint8_t>& bn, const FeatureLayout& layout,
                    const KfaParams& kfa_params);

struct MaskRecord {
    std::vector<std::uint8_t> bn;
    DescriptorKind kind = DescriptorKind::spherical_patches;
    double achieved_r1 = 0.0;
    std::uint64_t seed = 0;
    std::string config_echo;
};

void save_mask_json(const MaskRecord& record, const std::string& path);
MaskRecord load_mask_json(const std::string& path);

}  // namespace nasal
