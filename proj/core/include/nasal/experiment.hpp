#pragma once

#include "nasal/config.hpp"
#include "nasal/manifest.hpp"
#include "nasal/pipeline.hpp"

#include <string>
#include <vector>

namespace nasal {

enum class Protocol {
    identification,
    verification,
    expression_vs_expression,
    variable_gallery_size,
};

Protocol protocol_from_string(const std::string& s);
const char* to_string(Protocol p);

struct ExperimentSpec {
    Protocol protocol = Protocol::identification;
    std::string gallery_expression = "neutral";
    int gallery_per_subject = 1;
    std::string mask_file;  // optional selection mask (JSON)
    std::string out_dir;
    int variable_gallery_max = 3;
    int rounds = 3;  // interchanged gallery/probe draws to average over
    std::uint64_t seed = 1;
    unsigned jobs = 0;
    std::string manifest_path;  // echoed; also guards against mask reuse
};

struct ExperimentSummary {
    double r1 = 0.0;
    double eer = 0.0;
    double tar_at_far_1e3 = 0.0;
    int samples_total = 0;
    int samples_failed = 0;
    int gallery_size = 0;
    int probe_size = 0;
    std::vector<std::pair<std::string, double>> per_expression_r1;
    std::vector<std::pair<int, double>> r1_by_gallery_size;
};

/// Runs the full protocol: batch pipeline, optional mask application, gallery
/// and probe assembly, matching, and CSV reports under spec.out_dir
/// (landmarks.csv, errors.csv, manifest_echo.csv, gallery_probe.csv,
/// report.csv, plus the protocol's own tables). Output is byte-reproducible
/// for a fixed (manifest, config, seed).
ExperimentSummary run_experiment(const ExperimentSpec& spec,
                                 const std::vector<ManifestEntry>& entries, const Config& config);

}  // namespace nasal
