#pragma once

#include "nasal/geometry.hpp"
#include "nasal/landmarks.hpp"

#include <cstdint>

namespace nasal {

/// Parametric nose sample. The surface is a single-valued analytic height
/// field assembled from smooth bumps (ridge, tip dome, alae, brow) and
/// depressions (nasion pit, alar grooves, eye-corner pits, lip drop), so every
/// capture has exact ground-truth landmarks independent of sampling.
struct SyntheticNoseSpec {
    std::uint64_t subject_seed = 1;
    std::uint64_t capture_seed = 0;

    // Shape parameters (mm).
    double ridge_height = 9.0;
    double ridge_width = 5.5;
    double alar_spread = 10.0;
    double root_depth = 5.0;
    double tip_curvature = 4.5;

    // Expression displacement magnitudes (mm); 0 reproduces neutral exactly.
    double alar_flare = 0.0;
    double bridge_wrinkle = 0.0;
    double subnasale_lift = 0.0;

    double noise_sigma = 0.0;  // additive Gaussian z noise (mm)
    double sampling_mm = 0.75; // lattice spacing of the emitted cloud
};

/// The analytic surface for a spec, with closed-form ground truth.
class SyntheticNose {
public:
    explicit SyntheticNose(const SyntheticNoseSpec& spec);

    double height(double x, double y) const;

    /// Ground-truth landmarks, derived from the analytic surface by
    /// deterministic 1-D refinement of the defining extrema (the tilted-chart
    /// functionals use the stated default angles phi = pi/3, row tilt pi/4).
    const LandmarkSet& landmarks() const { return landmarks_; }

    const SyntheticNoseSpec& spec() const { return spec_; }

    // Sampled extent of the patch (mm). The y span is kept clearly larger
    // than the x span so the in-plane PCA axes are well separated.
    double x_min() const { return -28.0; }
    double x_max() const { return 28.0; }
    double y_min() const { return -26.0; }
    double y_max() const { return root_y_ + 16.0; }

private:
    SyntheticNoseSpec spec_;
    LandmarkSet landmarks_;

    // Derived neutral+expression constants.
    double root_y_ = 22.0;
    double alar_spread_eff_;
    double alar_height_eff_;
    double subnasale_y_eff_;
    double lip_drop_eff_;

    void compute_landmarks();
};

struct SyntheticSample {
    PointCloud cloud;
    LandmarkSet ground_truth;
    SyntheticNoseSpec spec;
};

/// Deterministic sample generation: lattice sampling of the analytic surface
/// plus seeded Gaussian z noise.
/// Throws DegenerateInputError on degenerate shape parameters.
SyntheticSample generate_synthetic(const SyntheticNoseSpec& spec);

/// Samples the analytic surface straight onto a DepthGrid (no cloud, no
/// resampling, no noise). Useful when a test needs an exactly symmetric or
/// exactly known grid.
DepthGrid sample_to_grid(const SyntheticNose& nose, double resolution_mm);

/// Draws per-subject shape parameters from the documented ranges.
SyntheticNoseSpec random_subject(std::uint64_t subject_seed);

}  // namespace nasal
