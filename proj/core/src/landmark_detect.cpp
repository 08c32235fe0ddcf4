#include "nasal/landmarks.hpp"

#include "nasal/align.hpp"
#include "nasal/crop.hpp"
#include "nasal/errors.hpp"
#include "nasal/minima.hpp"
#include "nasal/parallel.hpp"
#include "nasal/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace nasal {

Vec3 detect_root_initial(const DepthGrid& nose, const Vec3& tip0, double gamma_max, double beta,
                         int num_planes) {
    if (num_planes < 1) throw Error("num_planes must be >= 1");
    if (!nose.in_bounds(tip0.x(), tip0.y())) throw Error("tip outside grid");

    bool found = false;
    Vec3 best = Vec3::Zero();
    for (int m = 0; m < num_planes; ++m) {
        double gamma = num_planes == 1
                           ? 0.0
                           : -gamma_max + 2.0 * gamma_max * static_cast<double>(m) /
                                              static_cast<double>(num_planes - 1);
        // Plane normal (cos g, -sin g) gives the cut direction (sin g, cos g):
        // gamma = 0 is the vertical profile, the fan opens toward +-x.
        Vec2 normal(std::cos(gamma), -std::sin(gamma));
        PlanarCurve curve, upper;
        try {
            curve = plane_intersect(nose, tip0, normal);
            upper = half_curve(curve, 0.0, true);
        } catch (const DegenerateInputError&) {
            continue;
        }
        if (upper.size() < 3) continue;
        MinimaResult res;
        try {
            res = minima_detector(upper, 1, beta);
        } catch (const Error&) {
            continue;  // rotated chart not single-valued for this cut
        }
        if (res.indices.empty()) continue;
        Vec3 smin = upper.point3d(res.indices[0]);
        if (!found || smin.z() > best.z()) {
            best = smin;
            found = true;
        }
    }
    if (!found) throw LandmarkingError("nasal root: all cutting planes degenerate");
    return best;
}

namespace {

std::vector<Vec3> roi_candidates(const DepthGrid& grid, const Vec3& center, double roi_mm) {
    std::vector<Vec3> out;
    double h = roi_mm / 2.0;
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        double y = grid.y(r);
        if (y < center.y() - h || y > center.y() + h) continue;
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (!grid.mask(r, c)) continue;
            double x = grid.x(c);
            if (x < center.x() - h || x > center.x() + h) continue;
            out.push_back(grid.point(r, c));
        }
    }
    return out;
}

}  // namespace

RefineResult refine_tip_root(const DepthGrid& nose, const Vec3& l1_initial, const Vec3& l4_initial,
                             const LandmarkParams& params) {
    auto roots = roi_candidates(nose, l1_initial, params.roi_mm);
    auto tips = roi_candidates(nose, l4_initial, params.roi_mm);
    if (roots.empty() || tips.empty())
        throw LandmarkingError("refine_tip_root: empty candidate RoI");

    const std::size_t n_pairs = roots.size() * tips.size();
    std::vector<double> scores(n_pairs, std::numeric_limits<double>::infinity());

    const double halfwidth = params.refine_halfwidth_mm;
    const double col_step = params.refine_col_step_mm;
    const double row_step = params.refine_row_step_mm;

    parallel_for(
        n_pairs,
        [&](std::size_t k) {
            const Vec3& root = roots[k / tips.size()];
            const Vec3& tip = tips[k % tips.size()];
            Vec2 v(root.x() - tip.x(), root.y() - tip.y());
            double len = v.norm();
            if (len < 1e-9 || v.y() <= 0.0) return;
            Vec2 up = v / len;                 // rotated +y axis
            Vec2 right(up.y(), -up.x());       // rotated +x axis

            // Worst-row sum of |Z_left - Z_right| between the pair, after the
            // roll implied by the pair (sampled in the rotated frame).
            double e = -1.0;
            for (double yy = 0.0; yy <= len + 1e-9; yy += row_step) {
                double row_sum = 0.0;
                int overlap = 0;
                for (double dx = col_step; dx <= halfwidth + 1e-9; dx += col_step) {
                    Vec2 base(tip.x() + yy * up.x(), tip.y() + yy * up.y());
                    Vec2 pl = base - dx * right;
                    Vec2 pr = base + dx * right;
                    auto zl = nose.sample(pl.x(), pl.y());
                    if (!zl) continue;
                    auto zr = nose.sample(pr.x(), pr.y());
                    if (!zr) continue;
                    row_sum += std::abs(*zl - *zr);
                    ++overlap;
                }
                if (overlap > 0 && row_sum > e) e = row_sum;
            }
            if (e >= 0.0) scores[k] = e;
        },
        params.jobs);

    std::size_t best_k = n_pairs;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_pairs; ++k) {
        if (scores[k] < best_e) {
            best_e = scores[k];
            best_k = k;
        }
    }
    if (best_k == n_pairs)
        throw LandmarkingError("refine_tip_root: every candidate pair had an empty strip");

    const Vec3& root = roots[best_k / tips.size()];
    const Vec3& tip = tips[best_k % tips.size()];
    Vec2 v(root.x() - tip.x(), root.y() - tip.y());
    // Signed roll of the nose: an upright ridge rolled by +theta (CCW) makes
    // the root-tip vector (-sin theta, cos theta).
    double theta = std::atan2(-v.x(), v.y());

    // Symmetry plane through the winning pair; its profile extrema give the
    // final tip (max) and root (lowest point above the tip).
    Vec2 vhat = v.normalized();
    Vec2 plane_normal(vhat.y(), -vhat.x());
    PlanarCurve ridge = plane_intersect(nose, tip, plane_normal);

    Eigen::Index tip_idx = -1;
    double zmax = -std::numeric_limits<double>::max();
    for (Eigen::Index i = 0; i < ridge.size(); ++i) {
        if (ridge.height(i) > zmax) {
            zmax = ridge.height(i);
            tip_idx = i;
        }
    }
    Eigen::Index root_idx = -1;
    double zmin = std::numeric_limits<double>::max();
    for (Eigen::Index i = tip_idx + 1; i < ridge.size(); ++i) {
        if (ridge.height(i) < zmin) {
            zmin = ridge.height(i);
            root_idx = i;
        }
    }
    if (tip_idx < 0 || root_idx < 0)
        throw LandmarkingError("refine_tip_root: degenerate symmetry profile");

    RefineResult out;
    out.l4 = ridge.point3d(tip_idx);
    out.l1 = ridge.point3d(root_idx);
    out.theta_opt = theta;
    out.best_e = best_e;
    out.pairs_tried = static_cast<long>(n_pairs);
    return out;
}

Vec3 detect_subnasale(const DepthGrid& nose, const Vec3& l4, double theta_opt, double phi) {
    Vec2 vhat(-std::sin(theta_opt), std::cos(theta_opt));  // ridge direction at roll theta
    Vec2 normal(vhat.y(), -vhat.x());
    PlanarCurve ridge = plane_intersect(nose, l4, normal);
    PlanarCurve lower = half_curve(ridge, 0.0, false);  // outward-down chart
    if (lower.size() < 3) throw LandmarkingError("subnasale: profile below tip too short");
    MinimaResult res = minima_detector(lower, 1, phi);
    if (res.indices.empty()) throw LandmarkingError("subnasale: no minima below tip");
    return lower.point3d(res.indices[0]);
}

MaskMatrix polar_roi(const DepthGrid& grid, const Vec3& center, double r0, double a_upper,
                     double a_lower) {
    if (r0 <= 0.0) throw Error("polar_roi: r0 must be positive");
    MaskMatrix out = MaskMatrix::Zero(grid.rows(), grid.cols());
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        double dy = grid.y(r) - center.y();
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (!grid.mask(r, c)) continue;
            double dx = grid.x(c) - center.x();
            double rad = std::hypot(dx, dy);
            if (rad == 0.0) {
                out(r, c) = 1;
                continue;
            }
            double theta = std::atan2(dy, dx);
            if (theta < 0.0) theta += 2.0 * M_PI;
            double a = theta < M_PI ? a_upper : a_lower;
            // |cos|^a: the real-valued reading that reproduces the lobes.
            double bound = r0 * std::pow(std::abs(std::cos(theta)), a);
            if (rad <= bound) out(r, c) = 1;
        }
    }
    return out;
}

namespace {

struct RowPair {
    Vec3 left, right;
    double y;
};

// Per-row candidate pairs inside an RoI: three tilted-chart minima on each
// outward half-row, paired by most-similar distance to the reference landmark.
std::vector<RowPair> scan_roi_rows(const DepthGrid& grid, const MaskMatrix& roi, double center_x,
                                   const Vec3& reference, const LandmarkParams& params) {
    std::vector<RowPair> rows;
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        std::vector<double> xs, zs;
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (!roi(r, c)) continue;
            xs.push_back(grid.x(c));
            zs.push_back(grid.nz(r, c));
        }
        if (xs.size() < 3) continue;
        double y = grid.y(r);

        auto side_minima = [&](bool right_side) -> std::vector<Vec3> {
            std::vector<double> u, z;
            if (right_side) {
                for (std::size_t i = 0; i < xs.size(); ++i)
                    if (xs[i] >= center_x) {
                        u.push_back(xs[i] - center_x);
                        z.push_back(zs[i]);
                    }
            } else {
                for (std::size_t i = xs.size(); i-- > 0;)
                    if (xs[i] <= center_x) {
                        u.push_back(center_x - xs[i]);
                        z.push_back(zs[i]);
                    }
            }
            std::vector<Vec3> pts;
            if (u.size() < 3) return pts;
            PlanarCurve curve;
            curve.p.resize(static_cast<Eigen::Index>(u.size()), 2);
            for (std::size_t i = 0; i < u.size(); ++i) {
                curve.p(static_cast<Eigen::Index>(i), 0) = u[i];
                curve.p(static_cast<Eigen::Index>(i), 1) = z[i];
            }
            double tilt = right_side ? params.outward_tilt_right() : params.outward_tilt_left();
            MinimaResult res;
            try {
                res = minima_detector(curve, 3, tilt);
            } catch (const Error&) {
                return pts;
            }
            for (auto idx : res.indices) {
                double x = right_side ? center_x + curve.abscissa(idx) : center_x - curve.abscissa(idx);
                pts.emplace_back(x, y, curve.height(idx));
            }
            return pts;
        };

        auto rmin = side_minima(true);
        auto lmin = side_minima(false);
        if (rmin.empty() || lmin.empty()) continue;

        // Most similar distance to the reference. Steep features jitter by up
        // to a pixel of lattice offset times their wall slope, so distance
        // differences within a few pixels count as ties and are broken by the
        // minima detector's own rank order (lowest rotated height first).
        const double tie_tol = 3.0 * grid.resolution;
        double best = std::numeric_limits<double>::max();
        std::size_t best_rank = 0;
        Vec3 bl = Vec3::Zero(), br = Vec3::Zero();
        for (std::size_t ia = 0; ia < rmin.size(); ++ia) {
            double da = (rmin[ia] - reference).norm();
            for (std::size_t ib = 0; ib < lmin.size(); ++ib) {
                double diff = std::abs(da - (lmin[ib] - reference).norm());
                std::size_t rank = ia + ib;
                bool wins = diff < best - tie_tol ||
                            (diff < best + tie_tol && rank < best_rank);
                if (wins) {
                    best = std::min(best, diff);
                    best_rank = rank;
                    br = rmin[ia];
                    bl = lmin[ib];
                }
            }
        }
        rows.push_back(RowPair{bl, br, y});
    }
    return rows;
}

}  // namespace

std::vector<char> reject_outlier_chain(const std::vector<Vec3>& chain, double sigma_thresh) {
    auto sigma_of = [&](const std::vector<std::size_t>& idx) {
        double mean = 0.0;
        std::vector<double> d(idx.size() - 1);
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            d[i] = (chain[idx[i + 1]] - chain[idx[i]]).norm();
            mean += d[i];
        }
        mean /= static_cast<double>(d.size());
        double var = 0.0;
        for (double v : d) var += (v - mean) * (v - mean);
        return std::sqrt(var / static_cast<double>(d.size()));
    };

    std::vector<char> keep(chain.size(), 1);
    std::vector<std::size_t> idx(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) idx[i] = i;

    // Greedy sigma descent: drop the point whose removal shrinks the standard
    // deviation of the consecutive distances the most. Jumpy candidates die
    // first; the loop ends when sigma is under the threshold or the set is
    // stable, i.e. no single removal improves sigma any further (distances
    // between well-separated consistent clusters cannot be removed this way
    // and do not count against the candidates themselves).
    while (idx.size() >= 3) {
        double sigma = sigma_of(idx);
        if (sigma <= sigma_thresh) break;
        std::size_t best = 0;
        double best_sigma = std::numeric_limits<double>::max();
        for (std::size_t skip = 0; skip < idx.size(); ++skip) {
            std::vector<std::size_t> trial;
            trial.reserve(idx.size() - 1);
            for (std::size_t i = 0; i < idx.size(); ++i)
                if (i != skip) trial.push_back(idx[i]);
            double s = trial.size() >= 2 ? sigma_of(trial) : 0.0;
            if (s < best_sigma) {
                best_sigma = s;
                best = skip;
            }
        }
        if (best_sigma >= sigma) break;  // stable: removals no longer help
        keep[idx[best]] = 0;
        idx.erase(idx.begin() + static_cast<long>(best));
    }
    return keep;
}

AlarEyeResult detect_alar_and_eyes(const DepthGrid& nose, const Vec3& l1, const Vec3& l4,
                                   const LandmarkParams& params) {
    AlarEyeResult out;

    auto detect_pair = [&](const Vec3& center, double r0, double a_up, double a_lo,
                           const Vec3& reference, const char* what, Vec3& left, Vec3& right,
                           int& inlier_rows) -> std::vector<RowPair> {
        MaskMatrix roi = polar_roi(nose, center, r0, a_up, a_lo);
        auto rows = scan_roi_rows(nose, roi, center.x(), reference, params);
        if (rows.size() < 2)
            throw LandmarkingError(std::string(what) + ": fewer than 2 candidate rows");

        std::vector<Vec3> lchain, rchain;
        for (const auto& rp : rows) {
            lchain.push_back(rp.left);
            rchain.push_back(rp.right);
        }
        auto lkeep = reject_outlier_chain(lchain, params.sigma_thresh_mm);
        auto rkeep = reject_outlier_chain(rchain, params.sigma_thresh_mm);

        std::vector<RowPair> inliers;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (lkeep[i] && rkeep[i]) inliers.push_back(rows[i]);
        if (inliers.size() < 2)
            throw LandmarkingError(std::string(what) + ": fewer than 2 inlier rows");
        inlier_rows = static_cast<int>(inliers.size());
        left = inliers.front().left;   // placeholder, refined by the caller
        right = inliers.front().right;
        return inliers;
    };

    // Alar grooves: inlier pair with y closest to the tip's y.
    {
        int n = 0;
        Vec3 l, r;
        auto inliers = detect_pair(l4, params.alar_r0, params.alar_a_upper, params.alar_a_lower,
                                   l4, "alar grooves", l, r, n);
        double best = std::numeric_limits<double>::max();
        for (const auto& rp : inliers) {
            double dy = std::abs(rp.y - l4.y());
            if (dy < best) {
                best = dy;
                l = rp.left;
                r = rp.right;
            }
        }
        out.l3 = l;
        out.l6 = r;
        out.alar_inlier_rows = n;
    }

    // Eye corners: among the smallest-depth inliers per side, the pair with
    // the most similar distance to the tip.
    {
        int n = 0;
        Vec3 l, r;
        auto inliers = detect_pair(l1, params.eye_r0, params.eye_a_upper, params.eye_a_lower,
                                   l1, "eye corners", l, r, n);
        auto lowest = [&](bool right_side) {
            std::vector<Vec3> pts;
            for (const auto& rp : inliers) pts.push_back(right_side ? rp.right : rp.left);
            std::sort(pts.begin(), pts.end(),
                      [](const Vec3& a, const Vec3& b) { return a.z() < b.z(); });
            auto k = std::min<std::size_t>(pts.size(),
                                           static_cast<std::size_t>(params.eye_depth_candidates));
            pts.resize(k);
            return pts;
        };
        auto lc = lowest(false);
        auto rc = lowest(true);
        double best = std::numeric_limits<double>::max();
        for (const auto& a : lc) {
            double da = (a - l4).norm();
            for (const auto& b : rc) {
                double diff = std::abs(da - (b - l4).norm());
                if (diff < best) {
                    best = diff;
                    l = a;
                    r = b;
                }
            }
        }
        out.l2 = l;
        out.l7 = r;
        out.eye_inlier_rows = n;
    }

    return out;
}

LandmarkingOutput detect_landmarks(const DepthGrid& nose, const LandmarkParams& params) {
    LandmarkingOutput out;

    Vec3 tip0 = estimate_tip(nose);
    Vec3 root0 = detect_root_initial(nose, tip0, params.gamma_max, params.beta, params.num_planes);
    out.tip_initial = tip0;
    out.root_initial = root0;

    RefineResult refined = refine_tip_root(nose, root0, tip0, params);
    out.theta_opt = refined.theta_opt;

    Vec3 l5 = detect_subnasale(nose, refined.l4, refined.theta_opt, params.phi);

    // Undo the detected roll about the refined tip, then finish on the
    // corrected grid.
    out.roll_correction = RigidPose::roll_about(-refined.theta_opt, refined.l4);
    out.corrected = transform_grid(nose, out.roll_correction);

    Vec3 l1 = out.roll_correction.apply(refined.l1);
    Vec3 l4 = out.roll_correction.apply(refined.l4);
    l5 = out.roll_correction.apply(l5);

    // Re-project onto the corrected surface so landmarks stay on-grid.
    auto reproject = [&](Vec3& p) {
        if (auto z = out.corrected.sample(p.x(), p.y())) p.z() = *z;
    };
    reproject(l1);
    reproject(l4);
    reproject(l5);

    AlarEyeResult ae = detect_alar_and_eyes(out.corrected, l1, l4, params);

    out.landmarks.provenance = LandmarkSet::Provenance::refined;
    out.landmarks.l(1) = l1;
    out.landmarks.l(2) = ae.l2;
    out.landmarks.l(3) = ae.l3;
    out.landmarks.l(4) = l4;
    out.landmarks.l(5) = l5;
    out.landmarks.l(6) = ae.l6;
    out.landmarks.l(7) = ae.l7;
    return out;
}

}  // namespace nasal
