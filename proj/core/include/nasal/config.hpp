#pragma once

#include "nasal/crop.hpp"
#include "nasal/descriptors.hpp"
#include "nasal/ga.hpp"
#include "nasal/gabor.hpp"
#include "nasal/kfa.hpp"
#include "nasal/keypoints.hpp"
#include "nasal/landmarks.hpp"

#include <map>
#include <string>

namespace nasal {

/// Flat key=value configuration with section prefixes (geometry.*, crop.*,
/// landmark.*, gabor.*, descriptor.*, kfa.*, ga.*). Unknown keys are kept and
/// echoed; typed getters fall back to the built-in defaults, which follow the
/// reported operating point.
class Config {
public:
    Config() = default;

    static Config load(const std::string& path);
    void save(const std::string& path) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    // Parameter bundles assembled from the keys.
    double resolution_mm() const { return get_double("geometry.resolution_mm", 0.5); }
    double median_mask_mm() const { return get_double("geometry.median_mask_mm", 2.5); }
    int median_passes() const { return get_int("geometry.median_passes", 2); }
    int align_max_iter() const { return get_int("geometry.align_max_iter", 8); }
    double align_tol_deg() const { return get_double("geometry.align_tol_deg", 0.3); }

    CropParams crop_params() const;
    LandmarkParams landmark_params() const;
    GaborBankParams gabor_params() const;
    SubdivisionSpec subdivision_spec() const;
    KfaParams kfa_params() const;
    GAConfig ga_config() const;

    DescriptorKind descriptor_kind() const;
    double patch_radius_mm() const { return get_double("descriptor.patch_radius_mm", 11.0); }
    int bins_for(DescriptorKind kind) const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace nasal
