#pragma once

#include "nasal/features.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <vector>

namespace nasal {

struct KfaParams {
    double k1 = 0.0;       // polynomial kernel offset
    double k2 = 2.65;      // polynomial kernel power (elementwise)
    int dim = 0;           // projected dimension; 0 = gallery size - 1
    double ridge = 1e-6;   // within-scatter ridge, scaled by trace/n
    double shrinkage = 0.05;  // covariance shrinkage toward its diagonal
};

/// Trained kernel Fisher projection with the gallery as support set, plus the
/// conditioned covariance of the projected gallery used by the matcher.
struct GalleryModel {
    Eigen::MatrixXd support;      // S_g x d input features
    Eigen::VectorXd column_mean;  // Gram column means (centering state)
    double grand_mean = 0.0;
    Eigen::MatrixXd alpha;        // S_g x d_p dual coefficients
    Eigen::MatrixXd projected;    // S_g x d_p projected gallery (X_g)
    Eigen::MatrixXd sigma;        // d_p x d_p, SPD after conditioning
    std::vector<int> labels;
    KfaParams params;
    int d_p = 0;
};

/// Fits the kernel Fisher discriminant on the polynomial-kernel Gram matrix
/// (double-centered; within/between dual scatters; ridge conditioning) and the
/// shrinkage covariance of the projected gallery.
///
/// Throws Error when fewer than 2 classes exist or the conditioned
/// eigenproblem fails (the message names the class sizes).
GalleryModel kfa_fit(const Eigen::MatrixXd& gallery, const std::vector<int>& labels,
                     const KfaParams& params = {});

GalleryModel kfa_fit(const std::vector<FeatureVector>& gallery, const std::vector<int>& labels,
                     const KfaParams& params = {});

/// Projects probe rows into the trained subspace (S_p x d_p).
Eigen::MatrixXd kfa_project(const GalleryModel& model, const Eigen::MatrixXd& probes);

/// Stacks feature vectors into a row-per-sample matrix.
Eigen::MatrixXd features_to_matrix(const std::vector<FeatureVector>& features);

}  // namespace nasal
