#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nasal {

/// Modified NSGA-II settings. Defaults follow the reported operating point:
/// population 15x the variable count, Pareto fraction 0.35, crossover 0.8,
/// migration 0.2 (echoed; a single deme has nothing to migrate), stall
/// tolerance 1e-4.
struct GAConfig {
    int population_multiplier = 15;
    double pareto_fraction = 0.35;
    double crossover_fraction = 0.8;
    double migration_fraction = 0.2;
    double stall_tolerance = 1e-4;
    int stall_window = 50;
    int max_generations = 200;
    long max_evaluations = 0;   // 0 = no cap
    double mutation_rate = 0.0; // 0 = 1/K per bit
    bool genotype_crowding = false;  // crowding in bit space instead of objectives
    std::uint64_t rng_seed = 1;
    unsigned jobs = 0;

    std::string echo() const;
};

struct GAHistoryEntry {
    int generation = 0;
    double best_r1 = 0.0;
    double mean_r1 = 0.0;
    int best_cardinality = 0;
};

struct GAResult {
    std::vector<std::uint8_t> best_mask;
    double best_r1 = 0.0;
    int best_cardinality = 0;
    std::vector<GAHistoryEntry> history;
    long evaluations = 0;
    bool stalled = false;  // stopped on the stall criterion (vs generation cap)
};

using FitnessFn = std::function<double(const std::vector<std::uint8_t>&)>;

/// Bit-vector NSGA-II with objectives (maximize R1, minimize selected count)
/// and the elitism modification: each generation the best-fitness individual
/// and the maximum-diversity individual are carried over unconditionally.
/// Deterministic for a fixed seed; fitness calls may run in parallel.
GAResult nsga2_select(int num_bits, const FitnessFn& fitness, const GAConfig& config);

void write_history_csv(const std::vector<GAHistoryEntry>& history, const std::string& path);

}  // namespace nasal
