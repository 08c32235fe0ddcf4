#include "nasal/features.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>

namespace nasal {

FeatureVector extract_features(const GaborNormalStack& stack, const DescriptorSet& set, int bins) {
    if (bins < 2) throw Error("extract_features: need at least 2 bins");
    if (stack.scale_count() < 1) throw Error("extract_features: empty normal stack");

    FeatureVector fv;
    fv.layout.scales = stack.scale_count();
    fv.layout.descriptors = static_cast<int>(set.count());
    fv.layout.bins = bins;
    fv.layout.kind = set.kind;
    fv.values.assign(static_cast<std::size_t>(fv.layout.length()), 0.0);
    fv.empty_flags.assign(static_cast<std::size_t>(fv.layout.scales * fv.layout.descriptors), 0);

    for (int s = 0; s < fv.layout.scales; ++s) {
        const auto& scale = stack.scales[static_cast<std::size_t>(s)];
        const Eigen::MatrixXd* comps[3] = {&scale.nx, &scale.ny, &scale.nz};
        for (int d = 0; d < fv.layout.descriptors; ++d) {
            const auto& region = set.regions[static_cast<std::size_t>(d)];
            long used = 0;
            for (const auto& [r, c] : region) {
                if (!scale.confident(r, c)) continue;
                ++used;
                for (int comp = 0; comp < 3; ++comp) {
                    double v = (*comps[comp])(r, c);
                    // Uniform bins on [-1, 1], right-open except the last.
                    int b = static_cast<int>(std::floor((v + 1.0) / 2.0 * bins));
                    b = std::clamp(b, 0, bins - 1);
                    fv.values[static_cast<std::size_t>(fv.layout.index(s, comp, d, b))] += 1.0;
                }
            }
            if (used == 0) {
                fv.empty_flags[static_cast<std::size_t>(s * fv.layout.descriptors + d)] = 1;
                continue;
            }
            for (int comp = 0; comp < 3; ++comp)
                for (int b = 0; b < bins; ++b)
                    fv.values[static_cast<std::size_t>(fv.layout.index(s, comp, d, b))] /=
                        static_cast<double>(used);
        }
    }
    return fv;
}

void save_features(const FeatureVector& fv, const std::string& data_path,
                   const std::string& sidecar_path) {
    auto out = open_out(data_path);
    for (double v : fv.values) {
        float f = static_cast<float>(v);
        static_assert(sizeof(float) == 4);
        // Little-endian write; this codebase only targets little-endian hosts.
        out.write(reinterpret_cast<const char*>(&f), 4);
    }

    nlohmann::json j;
    j["kind"] = to_string(fv.layout.kind);
    j["scales"] = fv.layout.scales;
    j["descriptors"] = fv.layout.descriptors;
    j["bins"] = fv.layout.bins;
    j["length"] = fv.layout.length();
    j["order"] = "scale,component,descriptor,bin";
    j["strides"] = {
        {"scale", static_cast<long>(3) * fv.layout.descriptors * fv.layout.bins},
        {"component", static_cast<long>(fv.layout.descriptors) * fv.layout.bins},
        {"descriptor", fv.layout.bins},
        {"bin", 1},
    };
    j["empty_flags"] = fv.empty_flags;
    auto side = open_out(sidecar_path);
    side << j.dump(2) << '\n';
}

FeatureVector load_features(const std::string& data_path, const std::string& sidecar_path) {
    auto side = open_in(sidecar_path);
    nlohmann::json j;
    side >> j;

    FeatureVector fv;
    fv.layout.kind = descriptor_kind_from_string(j.at("kind").get<std::string>());
    fv.layout.scales = j.at("scales").get<int>();
    fv.layout.descriptors = j.at("descriptors").get<int>();
    fv.layout.bins = j.at("bins").get<int>();
    fv.empty_flags = j.at("empty_flags").get<std::vector<std::uint8_t>>();

    auto data = open_in(data_path);
    fv.values.reserve(static_cast<std::size_t>(fv.layout.length()));
    float f;
    while (data.read(reinterpret_cast<char*>(&f), 4)) fv.values.push_back(f);
    if (static_cast<long>(fv.values.size()) != fv.layout.length())
        throw ParseError("feature file length does not match sidecar: " + data_path, -1,
                         static_cast<long>(fv.values.size()) * 4);
    return fv;
}

}  // namespace nasal
