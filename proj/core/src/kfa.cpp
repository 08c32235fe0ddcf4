#include "nasal/kfa.hpp"

#include "nasal/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>

namespace nasal {

namespace {

// Elementwise polynomial kernel value. Negative bases cannot occur with the
// nonnegative histogram features and k1 >= 0; if one shows up with a
// fractional power it is clamped to zero rather than producing a NaN.
double poly(double base, double k2) {
    if (base <= 0.0 && std::floor(k2) != k2) return 0.0;
    return std::pow(base, k2);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KfaParams& p) {
    Eigen::MatrixXd raw = a * b.transpose();
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = poly(raw(i, j) + p.k1, p.k2);
    return raw;
}

}  // namespace

Eigen::MatrixXd features_to_matrix(const std::vector<FeatureVector>& features) {
    if (features.empty()) throw Error("no feature vectors");
    long d = features.front().layout.length();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()), d);
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (static_cast<long>(features[i].values.size()) != d)
            throw Error("feature vectors have inconsistent lengths");
        for (long j = 0; j < d; ++j)
            m(static_cast<Eigen::Index>(i), j) = features[i].values[static_cast<std::size_t>(j)];
    }
    return m;
}

GalleryModel kfa_fit(const std::vector<FeatureVector>& gallery, const std::vector<int>& labels,
                     const KfaParams& params) {
    return kfa_fit(features_to_matrix(gallery), labels, params);
}

GalleryModel kfa_fit(const Eigen::MatrixXd& gallery, const std::vector<int>& labels,
                     const KfaParams& params) {
    const auto n = gallery.rows();
    if (n < 2 || static_cast<Eigen::Index>(labels.size()) != n)
        throw Error("kfa_fit: need >= 2 labeled gallery samples");

    std::map<int, std::vector<Eigen::Index>> classes;
    for (Eigen::Index i = 0; i < n; ++i) classes[labels[i]].push_back(i);
    if (classes.size() < 2) throw Error("kfa_fit: need at least 2 classes");

    GalleryModel model;
    model.support = gallery;
    model.labels = labels;
    model.params = params;

    // Double-centered Gram matrix.
    Eigen::MatrixXd k = kernel_matrix(gallery, gallery, params);
    model.column_mean = k.colwise().mean();
    model.grand_mean = k.mean();
    Eigen::MatrixXd kc = k;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            kc(i, j) += model.grand_mean - model.column_mean(i) - model.column_mean(j);

    // Dual between-class scatter M and within-class scatter N.
    Eigen::MatrixXd m_scatter = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd n_scatter = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [label, idx] : classes) {
        const auto nc = static_cast<double>(idx.size());
        Eigen::VectorXd mean_col = Eigen::VectorXd::Zero(n);
        for (auto i : idx) mean_col += kc.col(i);
        mean_col /= nc;
        m_scatter += nc * mean_col * mean_col.transpose();
        for (auto i : idx) {
            Eigen::VectorXd diff = kc.col(i) - mean_col;
            n_scatter += diff * diff.transpose();
        }
    }

    // Ridge conditioning. The absolute floor keeps the problem definite even
    // for singleton classes, where the within-class dual scatter is exactly
    // zero (the paper's one-sample-per-subject galleries).
    double eps = params.ridge * n_scatter.trace() / static_cast<double>(n) +
                 1e-9 * kc.trace() / static_cast<double>(n) + 1e-12;
    n_scatter.diagonal().array() += eps;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_scatter, n_scatter);
    if (eig.info() != Eigen::Success) {
        std::string sizes;
        for (const auto& [label, idx] : classes)
            sizes += (sizes.empty() ? "" : ", ") + std::to_string(idx.size());
        throw Error("kfa_fit: within-class scatter singular beyond conditioning (class sizes " +
                    sizes + ")");
    }

    int d_p = params.dim > 0 ? params.dim : static_cast<int>(n) - 1;
    d_p = std::min<int>(d_p, static_cast<int>(n) - 1);
    model.d_p = d_p;

    // Top eigenvectors, deterministic sign (largest component positive).
    model.alpha.resize(n, d_p);
    for (int j = 0; j < d_p; ++j) {
        Eigen::VectorXd v = eig.eigenvectors().col(n - 1 - j);
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        model.alpha.col(j) = v;
    }

    model.projected = kc * model.alpha;

    // Shrinkage covariance of the projected gallery.
    Eigen::MatrixXd centered = model.projected.rowwise() - model.projected.colwise().mean();
    Eigen::MatrixXd sigma = centered.transpose() * centered / std::max<double>(1.0, n - 1.0);
    Eigen::MatrixXd diag = sigma.diagonal().asDiagonal();
    sigma = (1.0 - params.shrinkage) * sigma + params.shrinkage * diag;
    double floor = 1e-12 * sigma.trace() / static_cast<double>(d_p) + 1e-30;
    sigma.diagonal().array() += floor;
    model.sigma = sigma;
    return model;
}

Eigen::MatrixXd kfa_project(const GalleryModel& model, const Eigen::MatrixXd& probes) {
    if (probes.cols() != model.support.cols())
        throw Error("kfa_project: probe dimensionality does not match training");
    const auto n = model.support.rows();
    Eigen::MatrixXd k = kernel_matrix(probes, model.support, model.params);
    Eigen::VectorXd row_mean = k.rowwise().mean();
    for (Eigen::Index i = 0; i < k.rows(); ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            k(i, j) += model.grand_mean - row_mean(i) - model.column_mean(j);
    return k * model.alpha;
}

}  // namespace nasal
