#include "nasal/landmark_metrics.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <cmath>

namespace nasal {

ConsistencyReport consistency_metric(const std::vector<std::vector<LandmarkSet>>& per_subject) {
    ConsistencyReport report;
    std::array<std::vector<double>, 7> subject_means;

    for (const auto& captures : per_subject) {
        if (captures.size() < 2) {
            ++report.subjects_discarded;
            continue;
        }
        // Tip-centered landmark positions per capture.
        std::array<Vec3, 7> mean{};
        for (const auto& set : captures)
            for (int k = 1; k <= 7; ++k) mean[k - 1] += set.l(k) - set.l(4);
        for (auto& m : mean) m /= static_cast<double>(captures.size());

        for (int k = 1; k <= 7; ++k) {
            double dev = 0.0;
            for (const auto& set : captures)
                dev += ((set.l(k) - set.l(4)) - mean[k - 1]).norm();
            subject_means[k - 1].push_back(dev / static_cast<double>(captures.size()));
        }
        ++report.subjects_used;
    }

    for (int k = 0; k < 7; ++k) {
        const auto& v = subject_means[k];
        if (v.empty()) continue;
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        report.mean[k] = m;
        report.stddev[k] = std::sqrt(var / static_cast<double>(v.size()));
    }
    return report;
}

PrecisionReport precision_curve(const std::vector<LandmarkSet>& detected,
                                const std::vector<LandmarkSet>& ground_truth,
                                const std::vector<double>& thresholds_mm) {
    if (detected.size() != ground_truth.size())
        throw Error("precision_curve: detected/truth size mismatch");
    PrecisionReport report;
    report.thresholds_mm = thresholds_mm;
    report.samples = static_cast<int>(detected.size());
    for (int k = 0; k < 7; ++k) report.accuracy[k].assign(thresholds_mm.size(), 0.0);
    if (detected.empty()) return report;

    for (std::size_t i = 0; i < detected.size(); ++i) {
        for (int k = 1; k <= 7; ++k) {
            double err = (detected[i].l(k) - ground_truth[i].l(k)).norm();
            for (std::size_t t = 0; t < thresholds_mm.size(); ++t)
                if (err < thresholds_mm[t]) report.accuracy[k - 1][t] += 1.0;
        }
    }
    for (int k = 0; k < 7; ++k)
        for (auto& a : report.accuracy[k]) a /= static_cast<double>(detected.size());
    return report;
}

void write_consistency_csv(const ConsistencyReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "landmark,mean_mm,std_mm\n";
    for (int k = 1; k <= 7; ++k) {
        if (k == 4) continue;  // the tip is the origin of the metric
        out << LandmarkSet::name(k) << ',' << format_double(report.mean[k - 1]) << ','
            << format_double(report.stddev[k - 1]) << '\n';
    }
    out << "# subjects_used=" << report.subjects_used
        << " subjects_discarded=" << report.subjects_discarded << '\n';
}

void write_precision_csv(const PrecisionReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "threshold_mm";
    for (int k = 1; k <= 7; ++k) out << ',' << LandmarkSet::name(k);
    out << '\n';
    for (std::size_t t = 0; t < report.thresholds_mm.size(); ++t) {
        out << format_double(report.thresholds_mm[t]);
        for (int k = 0; k < 7; ++k) out << ',' << format_double(report.accuracy[k][t]);
        out << '\n';
    }
    out << "# samples=" << report.samples << '\n';
}

}  // namespace nasal
