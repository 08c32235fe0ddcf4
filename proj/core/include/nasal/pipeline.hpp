#pragma once

#include "nasal/config.hpp"
#include "nasal/features.hpp"
#include "nasal/landmarks.hpp"
#include "nasal/manifest.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nasal {

/// Per-sample outcome: either every stage's products, or a structured failure
/// record naming the stage. Batch processing never aborts on one bad sample.
struct SampleResult {
    std::string sample_id;
    bool ok = false;
    std::string failed_stage;  // "load", "preprocess", "landmark", "features"
    std::string error;

    LandmarkSet landmarks;
    double theta_opt = 0.0;
    RigidPose pose;  // input cloud frame -> corrected nose frame
    FeatureVector features;
    std::optional<DepthGrid> nose;  // the corrected nose grid (when requested)

    struct StageTiming {
        double preprocess_ms = 0.0;
        double landmark_ms = 0.0;
        double features_ms = 0.0;
    } timing;
};

struct PipelineOptions {
    bool keep_grids = false;       // retain the corrected nose grid per sample
    bool compute_features = true;  // landmark-only runs skip the Gabor stage
    unsigned jobs = 0;
};

/// Full chain on one cloud: resample, median filtering, iterative PCA
/// alignment, nose crop, landmarking, Gabor normal stack, descriptors,
/// feature assembly. Throws only for configuration errors; data problems are
/// captured in the result record.
SampleResult run_pipeline(const PointCloud& cloud, const std::string& sample_id,
                          const Config& config, const PipelineOptions& options = {});

/// Loads and processes every manifest entry (parallel across samples, results
/// in manifest order).
std::vector<SampleResult> run_batch(const std::vector<ManifestEntry>& entries,
                                    const Config& config, const PipelineOptions& options = {});

/// Landmark CSV (sample_id, L1x..L7z, theta_opt, status) per External
/// Interfaces; failed samples carry their stage as status.
void write_landmarks_csv(const std::vector<SampleResult>& results, const std::string& path);

}  // namespace nasal
