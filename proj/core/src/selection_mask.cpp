#include "nasal/selection_mask.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"
#include "nasal/scoring.hpp"

#include <nlohmann/json.hpp>

namespace nasal {

std::vector<std::uint8_t> expand_mask(const std::vector<std::uint8_t>& bn,
                                      const FeatureLayout& layout) {
    if (static_cast<int>(bn.size()) != layout.descriptors)
        throw Error("expand_mask: nucleus length does not match descriptor count");
    std::vector<std::uint8_t> expanded(static_cast<std::size_t>(layout.length()), 0);
    for (int s = 0; s < layout.scales; ++s)
        for (int comp = 0; comp < 3; ++comp)
            for (int d = 0; d < layout.descriptors; ++d) {
                if (!bn[static_cast<std::size_t>(d)]) continue;
                for (int b = 0; b < layout.bins; ++b)
                    expanded[static_cast<std::size_t>(layout.index(s, comp, d, b))] = 1;
            }
    return expanded;
}

Eigen::MatrixXd apply_mask_and_reduce(const Eigen::MatrixXd& features,
                                      const std::vector<std::uint8_t>& bn,
                                      const FeatureLayout& layout) {
    if (features.cols() != layout.length())
        throw Error("apply_mask_and_reduce: feature width does not match layout");
    auto expanded = expand_mask(bn, layout);
    long kept = 0;
    for (auto v : expanded) kept += v;
    Eigen::MatrixXd out(features.rows(), kept);
    long j = 0;
    for (long c = 0; c < layout.length(); ++c)
        if (expanded[static_cast<std::size_t>(c)]) out.col(j++) = features.col(c);
    return out;
}

double masked_rank1(const Eigen::MatrixXd& gallery, const std::vector<int>& gallery_labels,
                    const Eigen::MatrixXd& probes, const std::vector<int>& probe_labels,
                    const std::vector<std::uint8_t>& bn, const FeatureLayout& layout,
                    const KfaParams& kfa_params) {
    bool any = false;
    for (auto b : bn) any |= (b != 0);
    if (!any) return 0.0;

    Eigen::MatrixXd g = apply_mask_and_reduce(gallery, bn, layout);
    Eigen::MatrixXd p = apply_mask_and_reduce(probes, bn, layout);
    GalleryModel model = kfa_fit(g, gallery_labels, kfa_params);
    Eigen::MatrixXd xp = kfa_project(model, p);
    ScoreMatrix scores = mahalanobis_cosine(model.projected, xp, model.sigma);
    scores.gallery_labels = gallery_labels;
    scores.probe_labels = probe_labels;
    return rank_metrics(scores).r1;
}

void save_mask_json(const MaskRecord& record, const std::string& path) {
    nlohmann::json j;
    std::string bits;
    for (auto b : record.bn) bits += b ? '1' : '0';
    j["kind"] = to_string(record.kind);
    j["descriptors"] = record.bn.size();
    j["bits"] = bits;
    j["achieved_r1"] = record.achieved_r1;
    j["seed"] = record.seed;
    j["config"] = record.config_echo;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

MaskRecord load_mask_json(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    in >> j;
    MaskRecord record;
    record.kind = descriptor_kind_from_string(j.at("kind").get<std::string>());
    auto bits = j.at("bits").get<std::string>();
    for (char c : bits) record.bn.push_back(c == '1' ? 1 : 0);
    record.achieved_r1 = j.value("achieved_r1", 0.0);
    record.seed = j.value("seed", 0ULL);
    record.config_echo = j.value("config", std::string());
    return record;
}

}  // namespace nasal
