#include "nasal/synthetic.hpp"

#include "nasal/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace nasal {

namespace {

double gauss(double u) { return std::exp(-0.5 * u * u); }
double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Fixed structural constants (mm). Subject identity varies through the spec's
// shape parameters; these set the overall anatomy of the patch.
//
// The depressions are asymmetric on purpose: the landmark detectors tilt
// profile charts by up to pi/3, which requires approach walls steeper than
// tan(tilt) but exit walls gentler than cot(tilt) to keep the rotated chart
// single-valued. Real nasal anatomy has the same character (steep nasion
// under-brow wall, gentle bridge; steep inner alar crease, soft cheek).
constexpr double kBaseCurv = 0.004;
constexpr double kRidgePeakY = 4.0;
constexpr double kRidgeLen = 14.0;
constexpr double kTipHeight = 3.5;
constexpr double kAlarHeight = 2.2;
constexpr double kAlarSigma = 3.5;
constexpr double kAlarY = -3.0;
constexpr double kGrooveOffset = 4.5;
constexpr double kGrooveDepth = 4.5;
constexpr double kGrooveFlat = 1.6;      // half-width of the flat floor
constexpr double kGrooveSigmaIn = 1.3;   // wall toward the nose
constexpr double kGrooveSigmaOut = 3.0;  // wall toward the cheek
constexpr double kGrooveSigmaY = 2.6;
constexpr double kNasionSigmaLow = 1.3;  // approach wall (tip side)
constexpr double kNasionSigmaUp = 11.0;  // exit toward the brow
constexpr double kNasionSigmaX = 10.0;
constexpr double kEyeDx = 16.0;
constexpr double kEyeDepth = 6.0;
constexpr double kEyeSigmaIn = 1.4;   // wall toward the midline
constexpr double kEyeSigmaOut = 4.5;  // wall toward the temple
constexpr double kEyeSigmaY = 3.5;    // crease running along the socket line
constexpr double kTroughDx = 10.0;     // eye-socket troughs flanking the root
constexpr double kTroughDepth = 3.5;   // they make the nasion a true saddle
constexpr double kTroughSigmaX = 5.0;
constexpr double kTroughSigmaY = 4.5;
constexpr double kBrowHeight = 3.0;
constexpr double kBrowLen = 7.0;
constexpr double kSubnasaleY = -13.0;
constexpr double kLipDrop = 6.0;
constexpr double kLipK = 0.8;

// One-sided Gaussian: sharp for u < 0, soft for u >= 0.
double skew_gauss(double u, double sigma_neg, double sigma_pos) {
    return gauss(u / (u < 0.0 ? sigma_neg : sigma_pos));
}

// Flat-bottomed trench profile: 1 on [-w0, w0], one-sided Gaussian walls
// outside. C1 at the flat edges. The flat core keeps median filtering from
// rounding the trench floor away.
double trench(double u, double half_width, double sigma_neg, double sigma_pos) {
    if (u < -half_width) return gauss((u + half_width) / sigma_neg);
    if (u > half_width) return gauss((u - half_width) / sigma_pos);
    return 1.0;
}

// Golden-section polish of a bracketed minimum.
template <typename F>
double polish_min(F f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    for (int it = 0; it < 80 && (hi - lo) > 1e-11; ++it) {
        if (f(c) < f(d)) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - inv_phi * (hi - lo);
        d = lo + inv_phi * (hi - lo);
    }
    return 0.5 * (lo + hi);
}

// Lowest minimum found by dense scan plus polish. With `interior_only` the
// scan keeps only interior local minima (triplet test), matching the
// detectors' sign-change semantics; boundaries never count. The functionals
// are multimodal, so a plain golden section would be wrong; the scan step is
// far below every feature scale in the model.
template <typename F>
double scan_min(F f, double a, double b, bool interior_only = false, double scan_step = 0.02) {
    double best_u = a;
    double best_v = std::numeric_limits<double>::max();
    double prev2 = 0.0, prev1 = 0.0;
    double u1 = 0.0;
    int i = 0;
    for (double u = a; u <= b + 1e-12; u += scan_step, ++i) {
        double v = f(u);
        if (interior_only) {
            if (i >= 2 && prev1 < prev2 && prev1 < v && prev1 < best_v) {
                best_v = prev1;
                best_u = u1;
            }
            prev2 = prev1;
            prev1 = v;
            u1 = u;
        } else if (v < best_v) {
            best_v = v;
            best_u = u;
        }
    }
    if (best_v == std::numeric_limits<double>::max()) {
        // No interior minimum: degenerate parametrization.
        throw DegenerateInputError("synthetic landmark functional has no interior minimum");
    }
    return polish_min(f, std::max(a, best_u - scan_step), std::min(b, best_u + scan_step));
}

}  // namespace

SyntheticNose::SyntheticNose(const SyntheticNoseSpec& spec) : spec_(spec) {
    if (spec.ridge_width < 1.5 || spec.tip_curvature < 1.5 || spec.ridge_height < 2.0 ||
        spec.alar_spread < 6.0 || spec.root_depth < 0.0 || spec.sampling_mm <= 0.0)
        throw DegenerateInputError("degenerate synthetic nose shape parameters");

    alar_spread_eff_ = spec.alar_spread + spec.alar_flare;
    alar_height_eff_ = kAlarHeight * (1.0 + 0.08 * spec.alar_flare);
    subnasale_y_eff_ = kSubnasaleY + 0.6 * spec.subnasale_lift;
    lip_drop_eff_ = kLipDrop - 0.3 * spec.subnasale_lift;
    if (lip_drop_eff_ < 2.0)
        throw DegenerateInputError("subnasale_lift too large: lip step vanished");

    compute_landmarks();
}

double SyntheticNose::height(double x, double y) const {
    const auto& s = spec_;
    double z = -kBaseCurv * (x * x + 0.6 * y * y);

    // Brow above the root.
    z += kBrowHeight * gauss((y - (root_y_ + 11.0)) / kBrowLen) * gauss(x / 22.0);

    // Ridge and tip dome.
    z += s.ridge_height * gauss((y - kRidgePeakY) / kRidgeLen) * gauss(x / s.ridge_width);
    z += kTipHeight * gauss(std::hypot(x, y) / s.tip_curvature);

    // Alae with their grooves and the eye-corner pits. "Inward" for the
    // one-sided walls means toward the midline.
    for (double side : {-1.0, 1.0}) {
        double ax = side * alar_spread_eff_;
        z += alar_height_eff_ * gauss(std::hypot(x - ax, y - kAlarY) / kAlarSigma);

        double gx = side * (alar_spread_eff_ + kGrooveOffset);
        double gu = side * (x - gx);  // negative toward the nose
        z -= kGrooveDepth * trench(gu, kGrooveFlat, kGrooveSigmaIn, kGrooveSigmaOut) *
             gauss(y / kGrooveSigmaY);

        double ex = side * kEyeDx;
        double eu = side * (x - ex);
        z -= kEyeDepth * trench(eu, 1.2, kEyeSigmaIn, kEyeSigmaOut) *
             gauss((y - (root_y_ + 2.0)) / kEyeSigmaY);
    }

    // Nasion dip: steep toward the tip, gentle exit toward the brow, wide
    // laterally. Together with the ridge tail (a midline bump at this height)
    // and the eye-socket troughs it forms a saddle whose lateral valley
    // descends monotonically from the nasion into the sockets, so cutting
    // planes landing off-axis always bottom out below the saddle.
    z -= s.root_depth * gauss(x / kNasionSigmaX) *
         skew_gauss(y - root_y_, kNasionSigmaLow, kNasionSigmaUp);
    for (double side : {-1.0, 1.0}) {
        z -= kTroughDepth * gauss((x - side * kTroughDx) / kTroughSigmaX) *
             gauss((y - (root_y_ + 3.0)) / kTroughSigmaY);
    }

    // Lip drop below the subnasale.
    z -= lip_drop_eff_ * logistic((subnasale_y_eff_ - y) / kLipK);

    // Bridge wrinkle expression.
    if (s.bridge_wrinkle != 0.0) {
        double window = gauss((y - 11.0) / 8.0);
        z += 0.4 * s.bridge_wrinkle * std::sin(2.0 * M_PI * y / 8.0) * gauss(x / s.ridge_width) *
             window;
    }
    return z;
}

void SyntheticNose::compute_landmarks() {
    auto profile = [&](double y) { return height(0.0, y); };

    // Tip: global maximum of the symmetry profile.
    double tip_y = scan_min([&](double y) { return -profile(y); }, -8.0, 12.0);
    landmarks_.l(4) = Vec3(0.0, tip_y, profile(tip_y));

    // Root: lowest profile point above the tip (the nasion pit).
    double root_yy = scan_min(profile, root_y_ - 7.0, root_y_ + 7.0);
    landmarks_.l(1) = Vec3(0.0, root_yy, profile(root_yy));

    // Subnasale: lowest pi/3-tilted-chart minimum of the profile below the tip.
    const double phi = M_PI / 3.0;
    double u_max = tip_y - (subnasale_y_eff_ - 8.0);
    double u_star = scan_min(
        [&](double u) { return u * std::sin(phi) + profile(tip_y - u) * std::cos(phi); }, 0.5,
        u_max, true);
    landmarks_.l(5) = Vec3(0.0, tip_y - u_star, profile(tip_y - u_star));

    // Alar grooves: pi/4-tilted row-chart minima on the tip row.
    const double tilt = M_PI / 4.0;
    auto row_min = [&](double y_row, double sign) {
        double u_star2 = scan_min(
            [&](double u) {
                return u * std::sin(tilt) + height(sign * u, y_row) * std::cos(tilt);
            },
            alar_spread_eff_ * 0.5, alar_spread_eff_ + kGrooveOffset + 6.0, true);
        return Vec3(sign * u_star2, y_row, height(sign * u_star2, y_row));
    };
    landmarks_.l(3) = row_min(tip_y, -1.0);
    landmarks_.l(6) = row_min(tip_y, 1.0);

    // Eye corners: the deepest point of the crease, where each row's tilted
    // chart minimum has the smallest height (the detectors keep the
    // smallest-depth inliers).
    auto eye_min = [&](double sign) {
        Vec3 best(0, 0, std::numeric_limits<double>::max());
        for (double yy = root_y_ - 5.0; yy <= root_y_ + 9.0; yy += 0.05) {
            double u;
            try {
                u = scan_min(
                    [&](double uu) {
                        return uu * std::sin(tilt) + height(sign * uu, yy) * std::cos(tilt);
                    },
                    kEyeDx - 6.0, kEyeDx + 6.0, true);
            } catch (const DegenerateInputError&) {
                continue;  // row too far from the crease to have a chart minimum
            }
            double zz = height(sign * u, yy);
            if (zz < best.z()) best = Vec3(sign * u, yy, zz);
        }
        if (best.z() == std::numeric_limits<double>::max())
            throw DegenerateInputError("synthetic eye crease has no detectable minimum");
        return best;
    };
    landmarks_.l(2) = eye_min(-1.0);
    landmarks_.l(7) = eye_min(1.0);

    landmarks_.provenance = LandmarkSet::Provenance::refined;
}

SyntheticSample generate_synthetic(const SyntheticNoseSpec& spec) {
    SyntheticNose nose(spec);

    SyntheticSample sample;
    sample.spec = spec;
    sample.ground_truth = nose.landmarks();

    std::mt19937_64 rng(spec.subject_seed * 0x9E3779B97F4A7C15ULL + spec.capture_seed + 1);
    std::normal_distribution<double> noise(0.0, 1.0);

    // Lattice on exact multiples of the step, symmetric in x about the
    // midline. An asymmetric boundary strip would leak a spurious x-y
    // cross-covariance into the (nearly degenerate) in-plane PCA axes.
    double step = spec.sampling_mm;
    long i_max = static_cast<long>(std::floor(nose.x_max() / step));
    long j_min = static_cast<long>(std::ceil(nose.y_min() / step));
    long j_max = static_cast<long>(std::floor(nose.y_max() / step));
    for (long j = j_min; j <= j_max; ++j) {
        double y = static_cast<double>(j) * step;
        for (long i = -i_max; i <= i_max; ++i) {
            double x = static_cast<double>(i) * step;
            double z = nose.height(x, y);
            if (spec.noise_sigma > 0.0) z += spec.noise_sigma * noise(rng);
            sample.cloud.points.emplace_back(x, y, z);
        }
    }
    return sample;
}

DepthGrid sample_to_grid(const SyntheticNose& nose, double resolution_mm) {
    long i_max = static_cast<long>(std::floor(nose.x_max() / resolution_mm));
    long j_min = static_cast<long>(std::ceil(nose.y_min() / resolution_mm));
    long j_max = static_cast<long>(std::floor(nose.y_max() / resolution_mm));
    DepthGrid g = make_grid(-static_cast<double>(i_max) * resolution_mm,
                            static_cast<double>(j_min) * resolution_mm, resolution_mm,
                            j_max - j_min + 1, 2 * i_max + 1);
    for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            g.nz(r, c) = nose.height(g.x(c), g.y(r));
            g.mask(r, c) = 1;
        }
    return g;
}

SyntheticNoseSpec random_subject(std::uint64_t subject_seed) {
    std::mt19937_64 rng(subject_seed ^ 0xD1B54A32D192ED03ULL);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    SyntheticNoseSpec spec;
    spec.subject_seed = subject_seed;
    spec.ridge_height = uniform(7.5, 10.5);
    spec.ridge_width = uniform(5.2, 6.3);
    spec.alar_spread = uniform(8.5, 12.0);
    spec.root_depth = uniform(4.5, 6.5);
    spec.tip_curvature = uniform(4.0, 5.5);
    return spec;
}

}  // namespace nasal
