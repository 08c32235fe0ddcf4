// nasalbio: command-line front end for the 3D nasal-region recognition
// pipeline. Subcommands: synth, landmark, extract, select, match, experiment,
// eval-landmarks. Exit codes: 0 success, 1 total failure, 2 partial failures.

#include "nasal/config.hpp"
#include "nasal/csv.hpp"
#include "nasal/errors.hpp"
#include "nasal/experiment.hpp"
#include "nasal/ga.hpp"
#include "nasal/kfa.hpp"
#include "nasal/landmark_metrics.hpp"
#include "nasal/manifest.hpp"
#include "nasal/pipeline.hpp"
#include "nasal/scoring.hpp"
#include "nasal/selection_mask.hpp"
#include "nasal/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <set>

namespace fs = std::filesystem;
using namespace nasal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitPartial = 2;

struct CommonArgs {
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    unsigned jobs = 0;
    std::string descriptor = "patches";
    std::string mask_file;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_manifest = true) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    auto* m = cmd->add_option("--manifest", args.manifest_path, "dataset manifest CSV");
    if (needs_manifest) m->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--jobs", args.jobs, "worker threads (0 = hardware)");
    cmd->add_option("--descriptor", args.descriptor, "patches|curves")
        ->check(CLI::IsMember({"patches", "curves"}));
    cmd->add_option("--mask", args.mask_file, "selection mask JSON");
}

Config load_config(const CommonArgs& args) {
    Config config = args.config_path.empty() ? Config() : Config::load(args.config_path);
    config.set("descriptor.kind", args.descriptor);
    return config;
}

int exit_code_for(const std::vector<SampleResult>& results) {
    std::size_t failed = 0;
    for (const auto& r : results) failed += !r.ok;
    if (failed == results.size()) return kExitFailure;
    return failed > 0 ? kExitPartial : kExitOk;
}

void report_batch(const std::vector<SampleResult>& results) {
    std::size_t failed = 0;
    double pre = 0, lm = 0, feat = 0;
    for (const auto& r : results) {
        failed += !r.ok;
        pre += r.timing.preprocess_ms;
        lm += r.timing.landmark_ms;
        feat += r.timing.features_ms;
    }
    std::cerr << results.size() - failed << "/" << results.size() << " samples ok; mean stage ms:"
              << " preprocess=" << pre / results.size() << " landmark=" << lm / results.size()
              << " features=" << feat / results.size() << "\n";
    for (const auto& r : results)
        if (!r.ok) std::cerr << "  " << r.sample_id << " failed at " << r.failed_stage << ": "
                             << r.error << "\n";
}

// --- ground-truth landmark CSV (sample_id, L1x..L7z) ---

void save_truth_csv(const std::vector<std::pair<std::string, LandmarkSet>>& truth,
                    const std::string& path) {
    auto out = open_out(path);
    out << "sample_id";
    for (int k = 1; k <= 7; ++k) out << ",L" << k << "x,L" << k << "y,L" << k << "z";
    out << '\n';
    for (const auto& [id, set] : truth) {
        out << id;
        for (int k = 1; k <= 7; ++k) {
            const Vec3& p = set.l(k);
            out << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
                << format_double(p.z());
        }
        out << '\n';
    }
}

std::map<std::string, LandmarkSet> load_truth_csv(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, LandmarkSet> truth;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("sample_id", 0) == 0) continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 22) throw ParseError("ground truth row needs 22 columns", -1);
        LandmarkSet set;
        set.provenance = LandmarkSet::Provenance::refined;
        for (int k = 0; k < 7; ++k)
            set.points[static_cast<std::size_t>(k)] =
                Vec3(std::stod(fields[1 + 3 * k]), std::stod(fields[2 + 3 * k]),
                     std::stod(fields[3 + 3 * k]));
        truth[fields[0]] = set;
    }
    return truth;
}

// Expression archetypes for the synthetic generator, scaled by --magnitude.
SyntheticNoseSpec apply_expression(SyntheticNoseSpec spec, const std::string& expression,
                                   double magnitude) {
    if (expression == "neutral") return spec;
    if (expression == "happy") {
        spec.alar_flare = 1.6 * magnitude;
        spec.subnasale_lift = 1.2 * magnitude;
    } else if (expression == "surprise") {
        spec.bridge_wrinkle = 1.0 * magnitude;
        spec.subnasale_lift = -1.0 * magnitude;
    } else if (expression == "fear") {
        spec.bridge_wrinkle = 0.8 * magnitude;
        spec.alar_flare = 0.8 * magnitude;
    } else if (expression == "sadness") {
        spec.subnasale_lift = -1.2 * magnitude;
        spec.bridge_wrinkle = 0.4 * magnitude;
    } else if (expression == "anger") {
        spec.bridge_wrinkle = 1.4 * magnitude;
        spec.alar_flare = 0.5 * magnitude;
    } else if (expression == "disgust") {
        spec.alar_flare = 2.0 * magnitude;
        spec.bridge_wrinkle = 1.2 * magnitude;
        spec.subnasale_lift = 1.5 * magnitude;
    } else {
        throw Error("unknown expression: " + expression);
    }
    return spec;
}

int cmd_synth(const CommonArgs& args, int subjects, int captures, const std::string& expressions,
              double noise, double magnitude, const std::string& format) {
    fs::create_directories(fs::path(args.out_dir) / "clouds");

    std::vector<std::string> expr_list;
    {
        std::string token;
        for (char c : expressions + ",") {
            if (c == ',') {
                if (!token.empty()) expr_list.push_back(token);
                token.clear();
            } else {
                token += c;
            }
        }
    }

    std::vector<ManifestEntry> manifest;
    std::vector<std::pair<std::string, LandmarkSet>> truth;
    for (int s = 0; s < subjects; ++s) {
        auto base = random_subject(args.seed + static_cast<std::uint64_t>(s));
        for (const auto& expr : expr_list) {
            for (int c = 0; c < captures; ++c) {
                SyntheticNoseSpec spec = apply_expression(base, expr, magnitude);
                spec.noise_sigma = noise;
                spec.capture_seed = static_cast<std::uint64_t>(c) * 1000 + 17 * truth.size();
                auto sample = generate_synthetic(spec);

                std::string id = "s" + std::to_string(s) + "_" + expr + "_" + std::to_string(c);
                std::string file = "clouds/" + id + "." + format;
                std::string full = (fs::path(args.out_dir) / file).string();
                if (format == "xyz") {
                    save_point_cloud_xyz(sample.cloud, full);
                } else {
                    // The synthetic lattice is row-major rows x cols.
                    SyntheticNose nose(spec);
                    long cols = 2 * static_cast<long>(std::floor(nose.x_max() / spec.sampling_mm)) + 1;
                    long rows = static_cast<long>(sample.cloud.size()) / cols;
                    save_point_cloud_scanner_grid(sample.cloud, rows, cols, full);
                }
                ManifestEntry e;
                e.sample_id = id;
                e.path = full;
                e.format = cloud_format_from_string(format == "xyz" ? "xyz" : "scanner_grid");
                e.subject = "subj" + std::to_string(s);
                e.expression = expr;
                e.session = std::to_string(c);
                manifest.push_back(e);
                truth.emplace_back(id, sample.ground_truth);
            }
        }
    }
    save_manifest(manifest, (fs::path(args.out_dir) / "manifest.csv").string());
    save_truth_csv(truth, (fs::path(args.out_dir) / "ground_truth.csv").string());
    std::cerr << "wrote " << manifest.size() << " samples to " << args.out_dir << "\n";
    return kExitOk;
}

int cmd_landmark(const CommonArgs& args) {
    Config config = load_config(args);
    auto entries = load_manifest(args.manifest_path);
    PipelineOptions options;
    options.jobs = args.jobs;
    options.compute_features = false;
    auto results = run_batch(entries, config, options);
    fs::create_directories(args.out_dir);
    write_landmarks_csv(results, (fs::path(args.out_dir) / "landmarks.csv").string());
    report_batch(results);
    return exit_code_for(results);
}

int cmd_extract(const CommonArgs& args) {
    Config config = load_config(args);
    auto entries = load_manifest(args.manifest_path);
    PipelineOptions options;
    options.jobs = args.jobs;
    auto results = run_batch(entries, config, options);

    fs::create_directories(fs::path(args.out_dir) / "features");
    auto index = open_out((fs::path(args.out_dir) / "index.csv").string());
    index << "sample_id,data,sidecar,status\n";
    for (const auto& r : results) {
        if (r.ok) {
            std::string data = "features/" + r.sample_id + ".f32";
            std::string side = "features/" + r.sample_id + ".json";
            save_features(r.features, (fs::path(args.out_dir) / data).string(),
                          (fs::path(args.out_dir) / side).string());
            index << r.sample_id << ',' << data << ',' << side << ",ok\n";
        } else {
            index << r.sample_id << ",,,failed:" << r.failed_stage << '\n';
        }
    }
    write_landmarks_csv(results, (fs::path(args.out_dir) / "landmarks.csv").string());
    report_batch(results);
    return exit_code_for(results);
}

int cmd_select(const CommonArgs& args, const std::string& gallery_expression) {
    Config config = load_config(args);
    auto entries = load_manifest(args.manifest_path);
    auto labels = subject_labels(entries);

    PipelineOptions options;
    options.jobs = args.jobs;
    auto results = run_batch(entries, config, options);

    // Selection protocol: neutral samples train the projection (gallery), all
    // non-neutral samples are the test probes the mask must survive.
    std::vector<FeatureVector> gallery_f, probe_f;
    std::vector<int> glab, plab;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) continue;
        if (entries[i].expression == gallery_expression) {
            gallery_f.push_back(results[i].features);
            glab.push_back(labels[i]);
        } else {
            probe_f.push_back(results[i].features);
            plab.push_back(labels[i]);
        }
    }
    if (gallery_f.size() < 2 || probe_f.empty())
        throw Error("selection needs gallery ('" + gallery_expression + "') and probe samples");

    FeatureLayout layout = gallery_f.front().layout;
    Eigen::MatrixXd gallery = features_to_matrix(gallery_f);
    Eigen::MatrixXd probes = features_to_matrix(probe_f);
    KfaParams kfa_params = config.kfa_params();

    GAConfig ga = config.ga_config();
    ga.rng_seed = args.seed;
    ga.jobs = args.jobs;
    FitnessFn fitness = [&](const std::vector<std::uint8_t>& bn) {
        return masked_rank1(gallery, glab, probes, plab, bn, layout, kfa_params);
    };
    GAResult result = nsga2_select(layout.descriptors, fitness, ga);

    fs::create_directories(args.out_dir);
    MaskRecord record;
    record.bn = result.best_mask;
    record.kind = layout.kind;
    record.achieved_r1 = result.best_r1;
    record.seed = args.seed;
    record.config_echo = "manifest=" + args.manifest_path + " " + ga.echo();
    save_mask_json(record, (fs::path(args.out_dir) / "mask.json").string());
    write_history_csv(result.history, (fs::path(args.out_dir) / "history.csv").string());
    std::cerr << "GA: best R1=" << result.best_r1 << " cardinality=" << result.best_cardinality
              << " generations=" << result.history.size() << " evaluations=" << result.evaluations
              << (result.stalled ? " (stalled)" : "") << "\n";
    report_batch(results);
    return exit_code_for(results);
}

int run_protocol(const CommonArgs& args, Protocol protocol, const std::string& gallery_expression,
                 int gallery_per_subject, int max_gallery, int rounds) {
    Config config = load_config(args);
    auto entries = load_manifest(args.manifest_path);

    ExperimentSpec spec;
    spec.protocol = protocol;
    spec.gallery_expression = gallery_expression;
    spec.gallery_per_subject = gallery_per_subject;
    spec.mask_file = args.mask_file;
    spec.out_dir = args.out_dir;
    spec.variable_gallery_max = max_gallery;
    spec.rounds = rounds;
    spec.seed = args.seed;
    spec.jobs = args.jobs;
    spec.manifest_path = args.manifest_path;

    ExperimentSummary summary = run_experiment(spec, entries, config);
    std::cerr << "protocol=" << to_string(protocol) << " r1=" << summary.r1
              << " eer=" << summary.eer << " failures=" << summary.samples_failed << "/"
              << summary.samples_total << "\n";
    for (const auto& [expr, r1] : summary.per_expression_r1)
        std::cerr << "  " << expr << ": r1=" << r1 << "\n";
    for (const auto& [g, r1] : summary.r1_by_gallery_size)
        std::cerr << "  gallery=" << g << ": r1=" << r1 << "\n";
    if (summary.samples_failed == summary.samples_total) return kExitFailure;
    return summary.samples_failed > 0 ? kExitPartial : kExitOk;
}

int cmd_eval_landmarks(const CommonArgs& args, const std::string& truth_path,
                       const std::string& thresholds) {
    Config config = load_config(args);
    auto entries = load_manifest(args.manifest_path);

    PipelineOptions options;
    options.jobs = args.jobs;
    options.compute_features = false;
    auto results = run_batch(entries, config, options);
    fs::create_directories(args.out_dir);
    write_landmarks_csv(results, (fs::path(args.out_dir) / "landmarks.csv").string());

    // Consistency: per-subject groups of successful detections.
    std::map<std::string, std::vector<LandmarkSet>> by_subject;
    for (std::size_t i = 0; i < results.size(); ++i)
        if (results[i].ok || results[i].failed_stage == "features")
            by_subject[entries[i].subject].push_back(results[i].landmarks);
    std::vector<std::vector<LandmarkSet>> groups;
    for (auto& [s, sets] : by_subject) groups.push_back(std::move(sets));
    ConsistencyReport consistency = consistency_metric(groups);
    write_consistency_csv(consistency, (fs::path(args.out_dir) / "consistency.csv").string());

    if (!truth_path.empty()) {
        auto truth = load_truth_csv(truth_path);
        std::vector<double> th;
        {
            std::string token;
            for (char c : thresholds + ",") {
                if (c == ',') {
                    if (!token.empty()) th.push_back(std::stod(token));
                    token.clear();
                } else {
                    token += c;
                }
            }
        }
        std::vector<LandmarkSet> detected, expected;
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!(results[i].ok || results[i].failed_stage == "features")) continue;
            auto it = truth.find(entries[i].sample_id);
            if (it == truth.end()) continue;
            // Ground truth lives in the cloud frame; map it through the
            // sample's composite pose into the detection frame.
            LandmarkSet mapped = it->second;
            for (int k = 1; k <= 7; ++k) mapped.l(k) = results[i].pose.apply(mapped.l(k));
            detected.push_back(results[i].landmarks);
            expected.push_back(mapped);
        }
        PrecisionReport precision = precision_curve(detected, expected, th);
        write_precision_csv(precision, (fs::path(args.out_dir) / "precision.csv").string());
        std::cerr << "precision over " << precision.samples << " samples\n";
    }
    report_batch(results);
    return exit_code_for(results);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D nasal-region biometric pipeline"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    int subjects = 30, captures = 1;
    std::string expressions = "neutral,happy,surprise,fear,sadness,anger,disgust";
    double noise = 0.1, magnitude = 1.0;
    std::string cloud_format = "xyz";
    add_common(synth, args, false);
    synth->add_option("--subjects", subjects, "number of subjects");
    synth->add_option("--captures", captures, "captures per subject per expression");
    synth->add_option("--expressions", expressions, "comma-separated expression labels");
    synth->add_option("--noise", noise, "z noise sigma (mm)");
    synth->add_option("--magnitude", magnitude, "expression magnitude scale");
    synth->add_option("--cloud-format", cloud_format, "xyz|scanner_grid")
        ->check(CLI::IsMember({"xyz", "scanner_grid"}));

    auto* landmark = app.add_subcommand("landmark", "detect landmarks and report");
    add_common(landmark, args);

    auto* extract = app.add_subcommand("extract", "extract feature vectors");
    add_common(extract, args);

    auto* select = app.add_subcommand("select", "GA feature selection");
    std::string gallery_expression = "neutral";
    add_common(select, args);
    select->add_option("--gallery-expression", gallery_expression,
                       "expression used as the selection gallery");

    auto* match = app.add_subcommand("match", "identification/verification matching");
    bool verification = false;
    int gallery_per_subject = 1;
    add_common(match, args);
    match->add_option("--gallery-expression", gallery_expression);
    match->add_option("--gallery-per-subject", gallery_per_subject);
    match->add_flag("--verification", verification, "report ROC/EER instead of CMC");

    auto* experiment = app.add_subcommand("experiment", "full evaluation protocol");
    std::string protocol = "identification";
    int max_gallery = 3, rounds = 3;
    add_common(experiment, args);
    experiment->add_option("--protocol", protocol,
                           "identification|verification|expression_vs_expression|"
                           "variable_gallery_size");
    experiment->add_option("--gallery-expression", gallery_expression);
    experiment->add_option("--gallery-per-subject", gallery_per_subject);
    experiment->add_option("--max-gallery", max_gallery, "largest per-subject gallery size");
    experiment->add_option("--rounds", rounds, "interchanged gallery/probe draws");

    auto* eval = app.add_subcommand("eval-landmarks", "consistency/precision reports");
    std::string truth_path, thresholds = "10,12,15,20";
    add_common(eval, args);
    eval->add_option("--truth", truth_path, "ground-truth landmarks CSV");
    eval->add_option("--thresholds", thresholds, "comma-separated precision thresholds (mm)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return cmd_synth(args, subjects, captures, expressions, noise, magnitude, cloud_format);
        if (landmark->parsed()) return cmd_landmark(args);
        if (extract->parsed()) return cmd_extract(args);
        if (select->parsed()) return cmd_select(args, gallery_expression);
        if (match->parsed())
            return run_protocol(args,
                                verification ? Protocol::verification : Protocol::identification,
                                gallery_expression, gallery_per_subject, max_gallery, rounds);
        if (experiment->parsed())
            return run_protocol(args, protocol_from_string(protocol), gallery_expression,
                                gallery_per_subject, max_gallery, rounds);
        if (eval->parsed()) return cmd_eval_landmarks(args, truth_path, thresholds);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
