#include "nasal/scoring.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nasal {

ScoreMatrix mahalanobis_cosine(const Eigen::MatrixXd& gallery, const Eigen::MatrixXd& probes,
                               const Eigen::MatrixXd& sigma) {
    if (gallery.cols() != probes.cols() || gallery.cols() != sigma.rows() ||
        sigma.rows() != sigma.cols())
        throw Error("mahalanobis_cosine: dimension mismatch");

    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error("mahalanobis_cosine: sigma not positive definite");

    // Whiten rows: w = L^-1 x, then normalize.
    auto whiten = [&](const Eigen::MatrixXd& x, std::vector<std::uint8_t>& zero) {
        Eigen::MatrixXd w =
            llt.matrixL().solve(x.transpose());  // d x n, column i = whitened row i
        zero.assign(static_cast<std::size_t>(w.cols()), 0);
        for (Eigen::Index i = 0; i < w.cols(); ++i) {
            double norm = w.col(i).norm();
            if (norm < 1e-150) {
                zero[static_cast<std::size_t>(i)] = 1;
            } else {
                w.col(i) /= norm;
            }
        }
        return w;
    };

    std::vector<std::uint8_t> gzero, pzero;
    Eigen::MatrixXd wg = whiten(gallery, gzero);
    Eigen::MatrixXd wp = whiten(probes, pzero);

    ScoreMatrix out;
    out.d.resize(gallery.rows(), probes.rows());
    out.flagged = MaskMatrix::Zero(gallery.rows(), probes.rows());
    for (Eigen::Index g = 0; g < gallery.rows(); ++g) {
        for (Eigen::Index p = 0; p < probes.rows(); ++p) {
            if (gzero[static_cast<std::size_t>(g)] || pzero[static_cast<std::size_t>(p)]) {
                out.d(g, p) = 1.0;
                out.flagged(g, p) = 1;
                continue;
            }
            // ||a - b||^2 / 2 - 1 equals -(a . b) for unit vectors and stays
            // inside [-1, 1]; identical columns give exactly -1.
            out.d(g, p) = 0.5 * (wg.col(g) - wp.col(p)).squaredNorm() - 1.0;
        }
    }
    return out;
}

RankMetrics rank_metrics(const ScoreMatrix& scores) {
    const auto sg = scores.d.rows();
    const auto sp = scores.d.cols();
    if (static_cast<Eigen::Index>(scores.gallery_labels.size()) != sg ||
        static_cast<Eigen::Index>(scores.probe_labels.size()) != sp)
        throw Error("rank_metrics: labels missing");

    RankMetrics out;
    out.cmc.assign(static_cast<std::size_t>(sg), 0.0);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(sg));
    for (Eigen::Index p = 0; p < sp; ++p) {
        int label = scores.probe_labels[static_cast<std::size_t>(p)];
        bool present = std::find(scores.gallery_labels.begin(), scores.gallery_labels.end(),
                                 label) != scores.gallery_labels.end();
        if (!present) {
            ++out.probes_excluded;
            continue;
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            bool fa = scores.flagged(a, p), fb = scores.flagged(b, p);
            if (fa != fb) return fb;  // flagged entries sort last
            double da = scores.d(a, p), db = scores.d(b, p);
            if (da != db) return da < db;
            return a < b;
        });
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (scores.gallery_labels[static_cast<std::size_t>(order[k])] == label) {
                for (std::size_t j = k; j < out.cmc.size(); ++j) out.cmc[j] += 1.0;
                break;
            }
        }
        ++out.probes_used;
    }
    if (out.probes_used > 0)
        for (auto& v : out.cmc) v /= static_cast<double>(out.probes_used);
    out.r1 = out.cmc.empty() ? 0.0 : out.cmc.front();
    return out;
}

VerificationMetrics verification_metrics(const ScoreMatrix& scores) {
    std::vector<double> genuine, impostor;
    for (Eigen::Index g = 0; g < scores.d.rows(); ++g)
        for (Eigen::Index p = 0; p < scores.d.cols(); ++p) {
            if (scores.flagged(g, p)) continue;
            bool same = scores.gallery_labels[static_cast<std::size_t>(g)] ==
                        scores.probe_labels[static_cast<std::size_t>(p)];
            (same ? genuine : impostor).push_back(scores.d(g, p));
        }
    if (genuine.empty()) throw Error("verification_metrics: no genuine pairs");
    if (impostor.empty()) throw Error("verification_metrics: no impostor pairs");

    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());

    VerificationMetrics out;
    out.genuine_pairs = static_cast<long>(genuine.size());
    out.impostor_pairs = static_cast<long>(impostor.size());

    // Sweep thresholds over every observed score (acceptance: score <= t).
    std::vector<double> thresholds;
    thresholds.reserve(genuine.size() + impostor.size() + 2);
    thresholds.push_back(-1.0);
    thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
    thresholds.insert(thresholds.end(), impostor.begin(), impostor.end());
    thresholds.push_back(1.0);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    auto count_le = [](const std::vector<double>& v, double t) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
    };

    out.far.reserve(thresholds.size());
    out.tar.reserve(thresholds.size());
    double prev_far = 0.0, prev_frr = 1.0, prev_t = -1.0;
    bool eer_found = false;
    for (double t : thresholds) {
        double far = count_le(impostor, t) / static_cast<double>(impostor.size());
        double tar = count_le(genuine, t) / static_cast<double>(genuine.size());
        double frr = 1.0 - tar;
        out.far.push_back(far);
        out.tar.push_back(tar);
        if (!eer_found && far >= frr) {
            // Linear interpolation between the bracketing sweep points.
            double d0 = prev_far - prev_frr;
            double d1 = far - frr;
            double w = (d1 - d0) != 0.0 ? -d0 / (d1 - d0) : 0.0;
            out.eer = (prev_far + w * (far - prev_far) + prev_frr + w * (frr - prev_frr)) / 2.0;
            eer_found = true;
        }
        prev_far = far;
        prev_frr = frr;
        prev_t = t;
    }
    (void)prev_t;

    // TAR at FAR = 1e-3, interpolated on the sweep.
    const double target = 1e-3;
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < out.far.size(); ++i) {
        if (out.far[i] <= target && out.far[i + 1] > target) {
            double span = out.far[i + 1] - out.far[i];
            double w = span > 0.0 ? (target - out.far[i]) / span : 0.0;
            best = out.tar[i] + w * (out.tar[i + 1] - out.tar[i]);
            break;
        }
        if (out.far[i] <= target) best = out.tar[i];
    }
    if (out.far.back() <= target) best = out.tar.back();
    out.tar_at_far_1e3 = best;
    return out;
}

void write_scores_csv(const ScoreMatrix& scores, const std::string& path) {
    auto out = open_out(path);
    out << "gallery_index,gallery_label,probe_index,probe_label,distance,flagged\n";
    for (Eigen::Index g = 0; g < scores.d.rows(); ++g)
        for (Eigen::Index p = 0; p < scores.d.cols(); ++p)
            out << g << ',' << scores.gallery_labels[static_cast<std::size_t>(g)] << ',' << p
                << ',' << scores.probe_labels[static_cast<std::size_t>(p)] << ','
                << format_double(scores.d(g, p)) << ',' << int(scores.flagged(g, p)) << '\n';
}

void write_cmc_csv(const RankMetrics& metrics, const std::string& path) {
    auto out = open_out(path);
    out << "rank,rate\n";
    for (std::size_t k = 0; k < metrics.cmc.size(); ++k)
        out << (k + 1) << ',' << format_double(metrics.cmc[k]) << '\n';
}

void write_roc_csv(const VerificationMetrics& metrics, const std::string& path) {
    auto out = open_out(path);
    out << "far,tar\n";
    for (std::size_t i = 0; i < metrics.far.size(); ++i)
        out << format_double(metrics.far[i]) << ',' << format_double(metrics.tar[i]) << '\n';
}

}  // namespace nasal
