#pragma once

#include "nasal/landmarks.hpp"

#include <string>
#include <vector>

namespace nasal {

struct ConsistencyReport {
    // Per landmark L1..L7: dataset-wide mean and std (over subjects) of the
    // per-subject mean deviation from the subject's tip-centered average.
    std::array<double, 7> mean{};
    std::array<double, 7> stddev{};
    int subjects_used = 0;
    int subjects_discarded = 0;  // fewer than 2 captures
};

/// Within-subject landmarking consistency: every capture is translated so the
/// tip sits at the origin, per-subject mean landmark positions are formed, and
/// the per-capture deviations from them are averaged. Subjects with a single
/// capture are discarded.
ConsistencyReport consistency_metric(const std::vector<std::vector<LandmarkSet>>& per_subject);

struct PrecisionReport {
    std::vector<double> thresholds_mm;
    // accuracy[k][t]: fraction of samples with ||detected - truth|| < threshold
    // t for landmark k+1.
    std::array<std::vector<double>, 7> accuracy;
    int samples = 0;
};

/// Landmark precision against ground truth (lists aligned one-to-one).
PrecisionReport precision_curve(const std::vector<LandmarkSet>& detected,
                                const std::vector<LandmarkSet>& ground_truth,
                                const std::vector<double>& thresholds_mm);

/// CSV writers mirroring the consistency / precision table layouts
/// (landmark columns; precision has one row per threshold).
void write_consistency_csv(const ConsistencyReport& report, const std::string& path);
void write_precision_csv(const PrecisionReport& report, const std::string& path);

}  // namespace nasal
