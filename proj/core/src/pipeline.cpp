#include "nasal/pipeline.hpp"

#include "nasal/align.hpp"
#include "nasal/crop.hpp"
#include "nasal/csv.hpp"
#include "nasal/errors.hpp"
#include "nasal/median_filter.hpp"
#include "nasal/parallel.hpp"
#include "nasal/resample.hpp"
#include "nasal/surface_normals.hpp"

#include <chrono>
#include <map>
#include <mutex>

namespace nasal {

namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Gabor banks are immutable once built; share one per grid shape.
class BankCache {
public:
    const GaborBank& get(Eigen::Index rows, Eigen::Index cols, const GaborBankParams& params) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(rows, cols);
        auto it = banks_.find(key);
        if (it == banks_.end())
            it = banks_.emplace(key, GaborBank(rows, cols, params)).first;
        return it->second;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<Eigen::Index, Eigen::Index>, GaborBank> banks_;
};

}  // namespace

SampleResult run_pipeline(const PointCloud& cloud, const std::string& sample_id,
                          const Config& config, const PipelineOptions& options) {
    static BankCache bank_cache;

    SampleResult result;
    result.sample_id = sample_id;

    DepthGrid nose;
    RigidPose pose;
    auto t0 = std::chrono::steady_clock::now();
    try {
        DepthGrid grid = resample_to_grid(cloud, config.resolution_mm());
        for (int i = 0; i < config.median_passes(); ++i)
            grid = median_filter(grid, config.median_mask_mm());
        AlignResult aligned =
            iterative_pca_align(grid, config.align_max_iter(), config.align_tol_deg());
        pose = aligned.pose;

        Vec3 tip0 = estimate_tip(aligned.grid);
        LandmarkParams lp = config.landmark_params();
        Vec3 root0 =
            detect_root_initial(aligned.grid, tip0, lp.gamma_max, lp.beta, lp.num_planes);
        nose = crop_nose(aligned.grid, tip0, config.crop_params(), root0);
        nose = median_filter(nose, config.median_mask_mm());
    } catch (const Error& e) {
        result.failed_stage = "preprocess";
        result.error = e.what();
        return result;
    }
    result.timing.preprocess_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    LandmarkingOutput lm;
    try {
        LandmarkParams lp = config.landmark_params();
        lm = detect_landmarks(nose, lp);
    } catch (const Error& e) {
        result.failed_stage = "landmark";
        result.error = e.what();
        return result;
    }
    result.timing.landmark_ms = ms_since(t0);
    result.landmarks = lm.landmarks;
    result.theta_opt = lm.theta_opt;
    result.pose = lm.roll_correction.compose(pose);

    if (!options.compute_features) {
        result.ok = true;
        if (options.keep_grids) result.nose = std::move(lm.corrected);
        return result;
    }

    t0 = std::chrono::steady_clock::now();
    try {
        const GaborBank& bank =
            bank_cache.get(lm.corrected.rows(), lm.corrected.cols(), config.gabor_params());
        GaborScaleMaps maps = filter_scale_max(lm.corrected, bank);
        GaborNormalStack stack = scale_normals(lm.corrected, maps);

        KeypointGrid keypoints =
            build_keypoint_grid(lm.landmarks, lm.corrected, config.subdivision_spec());
        DescriptorKind kind = config.descriptor_kind();
        DescriptorSet set =
            kind == DescriptorKind::spherical_patches
                ? spherical_patches(keypoints, lm.corrected, config.patch_radius_mm())
                : nasal_curves(keypoints, lm.corrected, default_curve_pairs());
        result.features = extract_features(stack, set, config.bins_for(kind));
    } catch (const Error& e) {
        result.failed_stage = "features";
        result.error = e.what();
        return result;
    }
    result.timing.features_ms = ms_since(t0);

    if (options.keep_grids) result.nose = std::move(lm.corrected);
    result.ok = true;
    return result;
}

std::vector<SampleResult> run_batch(const std::vector<ManifestEntry>& entries,
                                    const Config& config, const PipelineOptions& options) {
    std::vector<SampleResult> results(entries.size());
    parallel_for(
        entries.size(),
        [&](std::size_t i) {
            const auto& e = entries[i];
            PointCloud cloud;
            try {
                cloud = load_point_cloud(e.path, e.format);
            } catch (const Error& err) {
                results[i].sample_id = e.sample_id;
                results[i].failed_stage = "load";
                results[i].error = err.what();
                return;
            }
            results[i] = run_pipeline(cloud, e.sample_id, config, options);
        },
        options.jobs);
    return results;
}

void write_landmarks_csv(const std::vector<SampleResult>& results, const std::string& path) {
    auto out = open_out(path);
    out << "sample_id";
    for (int k = 1; k <= 7; ++k)
        out << ",L" << k << "x,L" << k << "y,L" << k << "z";
    out << ",theta_opt,status\n";
    for (const auto& r : results) {
        out << r.sample_id;
        for (int k = 1; k <= 7; ++k) {
            if (r.ok || r.failed_stage == "features") {
                const Vec3& p = r.landmarks.l(k);
                out << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
                    << format_double(p.z());
            } else {
                out << ",,,";
            }
        }
        out << ',' << format_double(r.theta_opt) << ','
            << (r.ok ? "ok" : ("failed:" + r.failed_stage)) << '\n';
    }
}

}  // namespace nasal
