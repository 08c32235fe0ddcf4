#include "nasal/experiment.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"
#include "nasal/kfa.hpp"
#include "nasal/scoring.hpp"
#include "nasal/selection_mask.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

namespace nasal {

Protocol protocol_from_string(const std::string& s) {
    if (s == "identification") return Protocol::identification;
    if (s == "verification") return Protocol::verification;
    if (s == "expression_vs_expression") return Protocol::expression_vs_expression;
    if (s == "variable_gallery_size") return Protocol::variable_gallery_size;
    throw Error("unknown protocol: " + s);
}

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::identification: return "identification";
        case Protocol::verification: return "verification";
        case Protocol::expression_vs_expression: return "expression_vs_expression";
        case Protocol::variable_gallery_size: return "variable_gallery_size";
    }
    return "?";
}

namespace {

struct Dataset {
    Eigen::MatrixXd features;  // masked or raw
    FeatureLayout layout;
    std::vector<int> subject;           // per row
    std::vector<std::string> expression;
    std::vector<std::string> sample_id;
};

void write_errors_csv(const std::vector<SampleResult>& results, const std::string& path) {
    auto out = open_out(path);
    out << "sample_id,stage,error\n";
    for (const auto& r : results)
        if (!r.ok) out << r.sample_id << ',' << r.failed_stage << ",\"" << r.error << "\"\n";
}

// Matches probes against a gallery (both index lists into the dataset) and
// returns the score matrix with labels attached.
ScoreMatrix match(const Dataset& data, const std::vector<std::size_t>& gallery_idx,
                  const std::vector<std::size_t>& probe_idx, const KfaParams& kfa_params) {
    Eigen::MatrixXd gallery(static_cast<Eigen::Index>(gallery_idx.size()), data.features.cols());
    Eigen::MatrixXd probes(static_cast<Eigen::Index>(probe_idx.size()), data.features.cols());
    std::vector<int> glab, plab;
    for (std::size_t i = 0; i < gallery_idx.size(); ++i) {
        gallery.row(static_cast<Eigen::Index>(i)) = data.features.row(
            static_cast<Eigen::Index>(gallery_idx[i]));
        glab.push_back(data.subject[gallery_idx[i]]);
    }
    for (std::size_t i = 0; i < probe_idx.size(); ++i) {
        probes.row(static_cast<Eigen::Index>(i)) = data.features.row(
            static_cast<Eigen::Index>(probe_idx[i]));
        plab.push_back(data.subject[probe_idx[i]]);
    }
    GalleryModel model = kfa_fit(gallery, glab, kfa_params);
    Eigen::MatrixXd xp = kfa_project(model, probes);
    ScoreMatrix scores = mahalanobis_cosine(model.projected, xp, model.sigma);
    scores.gallery_labels = std::move(glab);
    scores.probe_labels = std::move(plab);
    return scores;
}

// Gallery = up to `per_subject` samples with the gallery expression, in
// sample_id order; probes = everything else.
void split_gallery(const Dataset& data, const std::string& gallery_expression, int per_subject,
                   std::vector<std::size_t>& gallery, std::vector<std::size_t>& probes) {
    std::map<int, std::vector<std::size_t>> candidates;
    for (std::size_t i = 0; i < data.subject.size(); ++i)
        if (data.expression[i] == gallery_expression) candidates[data.subject[i]].push_back(i);

    std::set<std::size_t> chosen;
    for (auto& [subject, idx] : candidates) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return data.sample_id[a] < data.sample_id[b];
        });
        for (std::size_t k = 0; k < idx.size() && k < static_cast<std::size_t>(per_subject); ++k)
            chosen.insert(idx[k]);
    }
    if (chosen.empty()) throw Error("no gallery samples with expression '" + gallery_expression + "'");
    for (std::size_t i = 0; i < data.subject.size(); ++i)
        (chosen.count(i) ? gallery : probes).push_back(i);
    if (probes.empty()) throw Error("gallery selection left no probe samples");
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec,
                                 const std::vector<ManifestEntry>& entries,
                                 const Config& config) {
    namespace fs = std::filesystem;
    if (spec.out_dir.empty()) throw Error("experiment needs an output directory");
    fs::create_directories(spec.out_dir);
    auto out_path = [&](const std::string& name) { return (fs::path(spec.out_dir) / name).string(); };

    // Protocol constraints checked before any compute.
    auto labels = subject_labels(entries);
    {
        std::set<int> subjects(labels.begin(), labels.end());
        if (subjects.size() < 2)
            throw Error("protocol requires at least 2 subjects in the manifest");
        std::set<std::string> ids;
        for (const auto& e : entries)
            if (!ids.insert(e.sample_id).second)
                throw Error("duplicate sample_id in manifest: " + e.sample_id);
    }

    PipelineOptions options;
    options.jobs = spec.jobs;
    auto results = run_batch(entries, config, options);

    save_manifest(entries, out_path("manifest_echo.csv"));
    write_landmarks_csv(results, out_path("landmarks.csv"));
    write_errors_csv(results, out_path("errors.csv"));

    ExperimentSummary summary;
    summary.samples_total = static_cast<int>(entries.size());

    Dataset data;
    std::vector<FeatureVector> features;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) {
            ++summary.samples_failed;
            continue;
        }
        features.push_back(results[i].features);
        data.subject.push_back(labels[i]);
        data.expression.push_back(entries[i].expression);
        data.sample_id.push_back(entries[i].sample_id);
    }
    if (features.size() < 4) throw Error("too few samples survived the pipeline");
    data.layout = features.front().layout;
    data.features = features_to_matrix(features);

    // Optional selection mask: reduce the feature space before matching.
    if (!spec.mask_file.empty()) {
        MaskRecord mask = load_mask_json(spec.mask_file);
        if (mask.kind != data.layout.kind)
            throw Error("selection mask descriptor kind does not match the experiment");
        if (static_cast<int>(mask.bn.size()) != data.layout.descriptors)
            throw Error("selection mask length does not match the descriptor count");
        if (!spec.manifest_path.empty() &&
            mask.config_echo.find("manifest=" + spec.manifest_path) != std::string::npos)
            throw Error("selection mask was trained on this manifest; use a disjoint dataset");
        data.features = apply_mask_and_reduce(data.features, mask.bn, data.layout);
    }

    KfaParams kfa_params = config.kfa_params();

    auto write_assignment = [&](const std::vector<std::size_t>& gallery,
                                const std::vector<std::size_t>& probes) {
        auto out = open_out(out_path("gallery_probe.csv"));
        out << "sample_id,role\n";
        for (auto i : gallery) out << data.sample_id[i] << ",gallery\n";
        for (auto i : probes) out << data.sample_id[i] << ",probe\n";
    };

    switch (spec.protocol) {
        case Protocol::identification: {
            std::vector<std::size_t> gallery, probes;
            split_gallery(data, spec.gallery_expression, spec.gallery_per_subject, gallery, probes);
            write_assignment(gallery, probes);
            ScoreMatrix scores = match(data, gallery, probes, kfa_params);
            RankMetrics rank = rank_metrics(scores);
            write_cmc_csv(rank, out_path("cmc.csv"));
            write_scores_csv(scores, out_path("scores.csv"));
            summary.r1 = rank.r1;
            summary.gallery_size = static_cast<int>(gallery.size());
            summary.probe_size = static_cast<int>(probes.size());
            break;
        }
        case Protocol::verification: {
            std::vector<std::size_t> gallery, probes;
            split_gallery(data, spec.gallery_expression, spec.gallery_per_subject, gallery, probes);
            write_assignment(gallery, probes);
            ScoreMatrix scores = match(data, gallery, probes, kfa_params);
            VerificationMetrics ver = verification_metrics(scores);
            write_roc_csv(ver, out_path("roc.csv"));
            summary.eer = ver.eer;
            summary.tar_at_far_1e3 = ver.tar_at_far_1e3;
            summary.gallery_size = static_cast<int>(gallery.size());
            summary.probe_size = static_cast<int>(probes.size());
            break;
        }
        case Protocol::expression_vs_expression: {
            std::vector<std::size_t> gallery, rest;
            split_gallery(data, spec.gallery_expression, spec.gallery_per_subject, gallery, rest);
            write_assignment(gallery, rest);
            std::set<std::string> expressions;
            for (auto i : rest) expressions.insert(data.expression[i]);
            auto out = open_out(out_path("expression_r1.csv"));
            out << "expression,probes,r1\n";
            for (const auto& expr : expressions) {
                std::vector<std::size_t> probes;
                for (auto i : rest)
                    if (data.expression[i] == expr) probes.push_back(i);
                if (probes.empty()) continue;
                ScoreMatrix scores = match(data, gallery, probes, kfa_params);
                RankMetrics rank = rank_metrics(scores);
                out << expr << ',' << probes.size() << ',' << format_double(rank.r1) << '\n';
                summary.per_expression_r1.emplace_back(expr, rank.r1);
            }
            summary.gallery_size = static_cast<int>(gallery.size());
            break;
        }
        case Protocol::variable_gallery_size: {
            // Per-subject capture lists in sample_id order.
            std::map<int, std::vector<std::size_t>> by_subject;
            for (std::size_t i = 0; i < data.subject.size(); ++i)
                by_subject[data.subject[i]].push_back(i);
            for (auto& [s, idx] : by_subject)
                std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                    return data.sample_id[a] < data.sample_id[b];
                });

            auto out = open_out(out_path("gallery_size_r1.csv"));
            out << "gallery_per_subject,rounds,mean_r1\n";
            for (int g = 1; g <= spec.variable_gallery_max; ++g) {
                double sum = 0.0;
                int rounds_done = 0;
                for (int round = 0; round < spec.rounds; ++round) {
                    std::vector<std::size_t> gallery, probes;
                    for (const auto& [s, idx] : by_subject) {
                        if (static_cast<int>(idx.size()) < g + 1) continue;
                        // Interchange gallery and probe roles by rotating the
                        // capture list between rounds.
                        for (std::size_t k = 0; k < idx.size(); ++k) {
                            std::size_t pos = (k + static_cast<std::size_t>(round)) % idx.size();
                            (k < static_cast<std::size_t>(g) ? gallery : probes)
                                .push_back(idx[pos]);
                        }
                    }
                    if (gallery.empty() || probes.empty()) continue;
                    ScoreMatrix scores = match(data, gallery, probes, kfa_params);
                    sum += rank_metrics(scores).r1;
                    ++rounds_done;
                }
                double mean = rounds_done > 0 ? sum / rounds_done : 0.0;
                out << g << ',' << rounds_done << ',' << format_double(mean) << '\n';
                summary.r1_by_gallery_size.emplace_back(g, mean);
            }
            break;
        }
    }

    {
        auto out = open_out(out_path("report.csv"));
        out << "key,value\n";
        out << "protocol," << to_string(spec.protocol) << '\n';
        out << "samples_total," << summary.samples_total << '\n';
        out << "samples_failed," << summary.samples_failed << '\n';
        out << "gallery_size," << summary.gallery_size << '\n';
        out << "probe_size," << summary.probe_size << '\n';
        out << "r1," << format_double(summary.r1) << '\n';
        out << "eer," << format_double(summary.eer) << '\n';
        out << "tar_at_far_1e3," << format_double(summary.tar_at_far_1e3) << '\n';
        out << "mask," << (spec.mask_file.empty() ? "none" : spec.mask_file) << '\n';
        out << "seed," << spec.seed << '\n';
    }
    return summary;
}

}  // namespace nasal
