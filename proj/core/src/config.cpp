#include "nasal/config.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <fstream>

namespace nasal {

Config Config::load(const std::string& path) {
    auto in = open_in(path);
    Config config;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        auto eq = line.find('=', start);
        if (eq == std::string::npos)
            throw ParseError("expected key=value in config " + path, line_no);
        std::string key = line.substr(start, eq - start);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t' || value.back() == '\r'))
            value.pop_back();
        std::size_t vs = value.find_first_not_of(" \t");
        if (vs != std::string::npos) value = value.substr(vs);
        else value.clear();
        config.values_[key] = value;
    }
    return config;
}

void Config::save(const std::string& path) const {
    auto out = open_out(path);
    for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw Error("config key " + key + " is not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw Error("config key " + key + " is not an integer: " + it->second);
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "1" || it->second == "true" || it->second == "yes") return true;
    if (it->second == "0" || it->second == "false" || it->second == "no") return false;
    throw Error("config key " + key + " is not a boolean: " + it->second);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

CropParams Config::crop_params() const {
    CropParams p;
    p.radius_mm = get_double("crop.radius_mm", p.radius_mm);
    p.below_tip_mm = get_double("crop.below_tip_mm", p.below_tip_mm);
    p.above_root_mm = get_double("crop.above_root_mm", p.above_root_mm);
    p.above_tip_mm = get_double("crop.above_tip_mm", p.above_tip_mm);
    return p;
}

LandmarkParams Config::landmark_params() const {
    LandmarkParams p;
    p.gamma_max = get_double("landmark.gamma_max", p.gamma_max);
    p.num_planes = get_int("landmark.num_planes", p.num_planes);
    p.beta = get_double("landmark.beta", p.beta);
    p.phi = get_double("landmark.phi", p.phi);
    p.zeta = get_double("landmark.zeta", p.zeta);
    p.eta = get_double("landmark.eta", p.eta);
    p.roi_mm = get_double("landmark.roi_mm", p.roi_mm);
    p.sigma_thresh_mm = get_double("landmark.sigma_thresh_mm", p.sigma_thresh_mm);
    p.alar_r0 = get_double("landmark.alar_r0", p.alar_r0);
    p.alar_a_upper = get_double("landmark.alar_a_upper", p.alar_a_upper);
    p.alar_a_lower = get_double("landmark.alar_a_lower", p.alar_a_lower);
    p.eye_r0 = get_double("landmark.eye_r0", p.eye_r0);
    p.eye_a_upper = get_double("landmark.eye_a_upper", p.eye_a_upper);
    p.eye_a_lower = get_double("landmark.eye_a_lower", p.eye_a_lower);
    p.refine_halfwidth_mm = get_double("landmark.refine_halfwidth_mm", p.refine_halfwidth_mm);
    p.refine_row_step_mm = get_double("landmark.refine_row_step_mm", p.refine_row_step_mm);
    p.refine_col_step_mm = get_double("landmark.refine_col_step_mm", p.refine_col_step_mm);
    p.eye_depth_candidates = get_int("landmark.eye_depth_candidates", p.eye_depth_candidates);
    return p;
}

GaborBankParams Config::gabor_params() const {
    GaborBankParams p;
    p.scales = get_int("gabor.scales", p.scales);
    p.orientations = get_int("gabor.orientations", p.orientations);
    p.omega_low = get_double("gabor.omega_low", p.omega_low);
    p.omega_high = get_double("gabor.omega_high", p.omega_high);
    p.radial_overlap = get_double("gabor.radial_overlap", p.radial_overlap);
    p.angular_overlap = get_double("gabor.angular_overlap", p.angular_overlap);
    p.confidence_radius_sigma =
        get_double("gabor.confidence_radius_sigma", p.confidence_radius_sigma);
    return p;
}

SubdivisionSpec Config::subdivision_spec() const {
    SubdivisionSpec s;
    s.root_row_parts = get_int("descriptor.grid_root_parts", s.root_row_parts);
    s.alar_row_parts = get_int("descriptor.grid_alar_parts", s.alar_row_parts);
    s.ridge_parts = get_int("descriptor.grid_ridge_parts", s.ridge_parts);
    return s;
}

KfaParams Config::kfa_params() const {
    KfaParams p;
    p.k1 = get_double("kfa.k1", p.k1);
    p.k2 = get_double("kfa.k2", p.k2);
    p.dim = get_int("kfa.dim", p.dim);
    p.ridge = get_double("kfa.ridge", p.ridge);
    p.shrinkage = get_double("kfa.shrinkage", p.shrinkage);
    return p;
}

GAConfig Config::ga_config() const {
    GAConfig g;
    g.population_multiplier = get_int("ga.population_multiplier", g.population_multiplier);
    g.pareto_fraction = get_double("ga.pareto_fraction", g.pareto_fraction);
    g.crossover_fraction = get_double("ga.crossover_fraction", g.crossover_fraction);
    g.migration_fraction = get_double("ga.migration_fraction", g.migration_fraction);
    g.stall_tolerance = get_double("ga.stall_tolerance", g.stall_tolerance);
    g.stall_window = get_int("ga.stall_window", g.stall_window);
    g.max_generations = get_int("ga.max_generations", g.max_generations);
    g.max_evaluations = get_int("ga.max_evaluations", static_cast<int>(g.max_evaluations));
    g.mutation_rate = get_double("ga.mutation_rate", g.mutation_rate);
    g.genotype_crowding = get_bool("ga.genotype_crowding", g.genotype_crowding);
    return g;
}

DescriptorKind Config::descriptor_kind() const {
    return descriptor_kind_from_string(get_string("descriptor.kind", "patches"));
}

int Config::bins_for(DescriptorKind kind) const {
    if (kind == DescriptorKind::spherical_patches) return get_int("descriptor.patch_bins", 21);
    return get_int("descriptor.curve_bins", 15);
}

}  // namespace nasal
