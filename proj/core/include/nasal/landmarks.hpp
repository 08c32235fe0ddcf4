#pragma once

#include "nasal/depth_grid.hpp"
#include "nasal/geometry.hpp"

#include <array>
#include <string>

namespace nasal {

/// The seven nasal landmarks. Index 0..6 = L1..L7:
///   L1 nasal root, L2 left eye corner, L3 left alar groove, L4 nose tip,
///   L5 subnasale, L6 right alar groove, L7 right eye corner.
/// "Left" means the smaller-x side of the pose-corrected grid.
struct LandmarkSet {
    enum class Provenance { initial, refined };

    std::array<Vec3, 7> points{};
    Provenance provenance = Provenance::initial;

    Vec3& l(int k) { return points[static_cast<std::size_t>(k - 1)]; }
    const Vec3& l(int k) const { return points[static_cast<std::size_t>(k - 1)]; }

    static const char* name(int k) {
        static const char* names[] = {"L1", "L2", "L3", "L4", "L5", "L6", "L7"};
        return names[k - 1];
    }

    /// Ordering invariants on a pose-corrected nose: the tip is the most
    /// protruding point, root above tip above subnasale, and the lateral
    /// pairs straddle the tip's x.
    bool ordering_ok() const {
        for (int k = 1; k <= 7; ++k)
            if (k != 4 && l(4).z() < l(k).z()) return false;
        if (!(l(1).y() > l(4).y() && l(4).y() > l(5).y())) return false;
        if (!(l(2).x() < l(4).x() && l(3).x() < l(4).x())) return false;
        if (!(l(6).x() > l(4).x() && l(7).x() > l(4).x())) return false;
        return true;
    }
};

/// Detection parameters. Angle defaults follow the reported operating point
/// (gamma_max = beta = phi = pi/3, eta = -zeta = pi/4); the rest are the
/// documented artifact choices.
struct LandmarkParams {
    double gamma_max = M_PI / 3.0;
    int num_planes = 31;
    double beta = M_PI / 3.0;
    double phi = M_PI / 3.0;
    double zeta = -M_PI / 4.0;
    double eta = M_PI / 4.0;
    double roi_mm = 5.0;
    double sigma_thresh_mm = 3.0;

    double alar_r0 = 30.0, alar_a_upper = 4.0, alar_a_lower = 0.75;
    double eye_r0 = 45.0, eye_a_upper = 4.0, eye_a_lower = 0.75;

    // Symmetry-objective sampling lattice (0.5 mm recovers the dense scan).
    double refine_halfwidth_mm = 12.0;
    double refine_row_step_mm = 1.5;
    double refine_col_step_mm = 1.0;

    int eye_depth_candidates = 5;
    unsigned jobs = 0;

    // Chart tilts for the outward-parametrized half-row curves. The paper
    // states the pair as eta = -zeta; outward charts make both sides use the
    // same positive angle.
    double outward_tilt_left() const { return eta; }
    double outward_tilt_right() const { return -zeta; }
};

/// Initial nasal root: max-of-minima over the fan of cutting planes through
/// the tip (angles gamma in [-gamma_max, gamma_max], chart tilt beta).
Vec3 detect_root_initial(const DepthGrid& nose, const Vec3& tip0, double gamma_max, double beta,
                         int num_planes);

struct RefineResult {
    Vec3 l1;            // refined nasal root
    Vec3 l4;            // refined nose tip
    double theta_opt;   // signed roll of the optimal pair, radians
    double best_e;      // objective at the optimum
    long pairs_tried;
};

/// Min-max refinement of root/tip: every candidate pair from the two RoIs is
/// roll-rotated upright and scored by the worst-row left/right asymmetry; the
/// winning pair fixes the symmetry plane whose profile extrema give L4 (max)
/// and L1 (lowest point above it).
RefineResult refine_tip_root(const DepthGrid& nose, const Vec3& l1_initial, const Vec3& l4_initial,
                             const LandmarkParams& params = {});

/// Subnasale: lowest tilted-chart minimum of the symmetry profile below the tip.
Vec3 detect_subnasale(const DepthGrid& nose, const Vec3& l4, double theta_opt, double phi);

/// Lobed polar region mask: pixels with r <= r0 * |cos(theta)|^a, a switching
/// between the upper (0 <= theta < pi) and lower half-planes.
MaskMatrix polar_roi(const DepthGrid& grid, const Vec3& center, double r0, double a_upper,
                     double a_lower);

/// Iterative outlier rejection on an ordered candidate chain: while the
/// standard deviation of consecutive 3D distances exceeds the threshold, the
/// point with the largest adjacent-distance sum is dropped. Returns keep
/// flags. Inlier count is non-increasing, so this always terminates.
std::vector<char> reject_outlier_chain(const std::vector<Vec3>& chain, double sigma_thresh_mm);

struct AlarEyeResult {
    Vec3 l2, l3, l6, l7;
    int alar_inlier_rows = 0;
    int eye_inlier_rows = 0;
};

/// Alar grooves (L3/L6) and eye corners (L2/L7) from the polar RoI row scans
/// with iterative sigma-threshold outlier rejection.
AlarEyeResult detect_alar_and_eyes(const DepthGrid& nose, const Vec3& l1, const Vec3& l4,
                                   const LandmarkParams& params = {});

struct LandmarkingOutput {
    LandmarkSet landmarks;      // refined, in the roll-corrected frame
    double theta_opt = 0.0;     // detected roll of the input grid
    DepthGrid corrected;        // roll-corrected nose grid
    RigidPose roll_correction;  // input frame -> corrected frame
    Vec3 tip_initial, root_initial;
};

/// Full landmarking chain on a cropped, aligned nose grid.
LandmarkingOutput detect_landmarks(const DepthGrid& nose, const LandmarkParams& params = {});

}  // namespace nasal
