#pragma once

#include "nasal/depth_grid.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace nasal {

/// Mahalanobis-cosine distances, gallery rows against probe columns.
/// Entries lie in [-1, 1]; flagged entries (zero-norm projections) compare as
/// +infinity in rankings and are skipped by the verification sweep.
struct ScoreMatrix {
    Eigen::MatrixXd d;  // S_g x S_p
    MaskMatrix flagged;
    std::vector<int> gallery_labels;
    std::vector<int> probe_labels;
};

/// Negative cosine similarity in the Sigma-whitened space, computed as
/// ||w_g - w_p||^2 / 2 - 1 on whitened unit vectors, which keeps the result in
/// [-1, 1] by construction and makes D(x, x) exactly -1.
ScoreMatrix mahalanobis_cosine(const Eigen::MatrixXd& gallery, const Eigen::MatrixXd& probes,
                               const Eigen::MatrixXd& sigma);

struct RankMetrics {
    std::vector<double> cmc;  // cmc[k] = fraction of probes matched in top k+1
    double r1 = 0.0;
    int probes_used = 0;
    int probes_excluded = 0;  // probe label absent from the gallery
};

/// CMC curve and rank-one rate; ascending distance, ties broken by gallery
/// index, flagged entries never win.
RankMetrics rank_metrics(const ScoreMatrix& scores);

struct VerificationMetrics {
    std::vector<double> far;  // per sweep point
    std::vector<double> tar;
    double eer = 0.0;
    double tar_at_far_1e3 = 0.0;
    long genuine_pairs = 0;
    long impostor_pairs = 0;
};

/// Threshold sweep over the observed scores; EER by linear interpolation of
/// the FAR/FRR crossing. Throws when either pair population is empty.
VerificationMetrics verification_metrics(const ScoreMatrix& scores);

void write_scores_csv(const ScoreMatrix& scores, const std::string& path);
void write_cmc_csv(const RankMetrics& metrics, const std::string& path);
void write_roc_csv(const VerificationMetrics& metrics, const std::string& path);

}  // namespace nasal
