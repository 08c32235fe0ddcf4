#include "nasal/ga.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"
#include "nasal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nasal {

std::string GAConfig::echo() const {
    std::ostringstream ss;
    ss << "population_multiplier=" << population_multiplier
       << " pareto_fraction=" << pareto_fraction << " crossover_fraction=" << crossover_fraction
       << " migration_fraction=" << migration_fraction << " stall_tolerance=" << stall_tolerance
       << " stall_window=" << stall_window << " max_generations=" << max_generations
       << " max_evaluations=" << max_evaluations << " mutation_rate=" << mutation_rate
       << " genotype_crowding=" << genotype_crowding << " rng_seed=" << rng_seed;
    return ss.str();
}

namespace {

struct Individual {
    std::vector<std::uint8_t> bits;
    double r1 = 0.0;
    int cardinality = 0;
    // Objectives to minimize: (1 - r1, cardinality).
    double f1() const { return 1.0 - r1; }
    double f2() const { return static_cast<double>(cardinality); }
    int rank = 0;
    double crowding = 0.0;
};

int popcount(const std::vector<std::uint8_t>& bits) {
    int n = 0;
    for (auto b : bits) n += (b != 0);
    return n;
}

bool dominates(const Individual& a, const Individual& b) {
    bool better = a.f1() < b.f1() || a.f2() < b.f2();
    return a.f1() <= b.f1() && a.f2() <= b.f2() && better;
}

// Fast nondominated sort; fills rank, returns fronts as index lists.
std::vector<std::vector<std::size_t>> nondominated_sort(std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> dominated_by(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pop[i], pop[j])) dominated[i].push_back(j);
            else if (dominates(pop[j], pop[i])) ++dominated_by[i];
        }
        if (dominated_by[i] == 0) {
            pop[i].rank = 0;
            fronts[0].push_back(i);
        }
    }
    std::size_t fi = 0;
    while (!fronts[fi].empty()) {
        std::vector<std::size_t> next;
        for (auto i : fronts[fi]) {
            for (auto j : dominated[i]) {
                if (--dominated_by[j] == 0) {
                    pop[j].rank = static_cast<int>(fi) + 1;
                    next.push_back(j);
                }
            }
        }
        fronts.push_back(std::move(next));
        ++fi;
    }
    fronts.pop_back();
    return fronts;
}

// Crowding distance within one front, either in objective space or in bit
// (phenotype) space as mean Hamming distance to the front.
void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front,
                     bool genotype) {
    if (front.size() <= 2) {
        for (auto i : front) pop[i].crowding = std::numeric_limits<double>::infinity();
        return;
    }
    if (genotype) {
        for (auto i : front) {
            double sum = 0.0;
            for (auto j : front) {
                if (i == j) continue;
                int h = 0;
                for (std::size_t b = 0; b < pop[i].bits.size(); ++b)
                    h += pop[i].bits[b] != pop[j].bits[b];
                sum += h;
            }
            pop[i].crowding = sum / static_cast<double>(front.size() - 1);
        }
        return;
    }
    for (auto i : front) pop[i].crowding = 0.0;
    for (int obj = 0; obj < 2; ++obj) {
        auto value = [&](std::size_t i) { return obj == 0 ? pop[i].f1() : pop[i].f2(); };
        std::vector<std::size_t> order(front);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        double span = value(order.back()) - value(order.front());
        pop[order.front()].crowding = std::numeric_limits<double>::infinity();
        pop[order.back()].crowding = std::numeric_limits<double>::infinity();
        if (span <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < order.size(); ++k)
            pop[order[k]].crowding += (value(order[k + 1]) - value(order[k - 1])) / span;
    }
}

}  // namespace

GAResult nsga2_select(int num_bits, const FitnessFn& fitness, const GAConfig& config) {
    if (num_bits < 2) throw Error("nsga2_select: need at least 2 descriptors");
    const std::size_t pop_size =
        static_cast<std::size_t>(std::max(4, config.population_multiplier * num_bits));
    const double mutation =
        config.mutation_rate > 0.0 ? config.mutation_rate : 1.0 / static_cast<double>(num_bits);

    std::mt19937_64 rng(config.rng_seed);
    auto coin = [&](double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
    };

    GAResult result;

    auto evaluate = [&](std::vector<Individual>& group) {
        parallel_for(
            group.size(),
            [&](std::size_t i) {
                group[i].r1 = fitness(group[i].bits);
                group[i].cardinality = popcount(group[i].bits);
            },
            config.jobs);
        result.evaluations += static_cast<long>(group.size());
    };

    // Uniform random initialization.
    std::vector<Individual> pop(pop_size);
    for (auto& ind : pop) {
        ind.bits.resize(static_cast<std::size_t>(num_bits));
        for (auto& b : ind.bits) b = coin(0.5) ? 1 : 0;
    }
    evaluate(pop);

    auto fronts = nondominated_sort(pop);
    for (const auto& front : fronts) assign_crowding(pop, front, config.genotype_crowding);

    auto better = [](const Individual& a, const Individual& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.crowding > b.crowding;
    };
    auto tournament = [&]() -> const Individual& {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        const Individual& a = pop[pick(rng)];
        const Individual& b = pop[pick(rng)];
        return better(a, b) ? a : b;
    };

    std::vector<double> best_history;
    for (int gen = 0;; ++gen) {
        // Track the running best (highest R1, ties to fewer descriptors).
        const Individual* best = &pop.front();
        double mean_r1 = 0.0;
        for (const auto& ind : pop) {
            mean_r1 += ind.r1;
            if (ind.r1 > best->r1 ||
                (ind.r1 == best->r1 && ind.cardinality < best->cardinality))
                best = &ind;
        }
        mean_r1 /= static_cast<double>(pop.size());
        best_history.push_back(best->r1);
        result.history.push_back(
            GAHistoryEntry{gen, best->r1, mean_r1, best->cardinality});
        result.best_mask = best->bits;
        result.best_r1 = best->r1;
        result.best_cardinality = best->cardinality;

        if (gen >= config.max_generations) break;
        if (config.max_evaluations > 0 && result.evaluations >= config.max_evaluations) break;
        if (gen >= config.stall_window) {
            double improvement =
                best_history.back() - best_history[best_history.size() - 1 -
                                                   static_cast<std::size_t>(config.stall_window)];
            if (improvement < config.stall_tolerance) {
                result.stalled = true;
                break;
            }
        }

        // Offspring: crossover_fraction of the children from uniform
        // crossover, the remainder mutants of single parents.
        std::vector<Individual> children;
        children.reserve(pop_size);
        auto n_xover = static_cast<std::size_t>(
            std::lround(config.crossover_fraction * static_cast<double>(pop_size)));
        for (std::size_t c = 0; c < pop_size; ++c) {
            Individual child;
            child.bits.resize(static_cast<std::size_t>(num_bits));
            if (c < n_xover) {
                const Individual& p1 = tournament();
                const Individual& p2 = tournament();
                for (std::size_t b = 0; b < child.bits.size(); ++b)
                    child.bits[b] = coin(0.5) ? p1.bits[b] : p2.bits[b];
            } else {
                const Individual& p1 = tournament();
                child.bits = p1.bits;
                for (auto& b : child.bits)
                    if (coin(mutation)) b = b ? 0 : 1;
            }
            children.push_back(std::move(child));
        }
        evaluate(children);

        // Environmental selection over parents + children, with the first
        // front capped at the Pareto fraction.
        std::vector<Individual> combined;
        combined.reserve(pop.size() + children.size());
        for (auto& ind : pop) combined.push_back(std::move(ind));
        for (auto& ind : children) combined.push_back(std::move(ind));

        auto cfronts = nondominated_sort(combined);
        for (const auto& front : cfronts)
            assign_crowding(combined, front, config.genotype_crowding);

        auto front_cap = static_cast<std::size_t>(
            std::ceil(config.pareto_fraction * static_cast<double>(pop_size)));
        std::vector<std::size_t> selected;
        selected.reserve(pop_size);
        for (std::size_t fi = 0; fi < cfronts.size() && selected.size() < pop_size; ++fi) {
            std::vector<std::size_t> front = cfronts[fi];
            std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
                if (combined[a].crowding != combined[b].crowding)
                    return combined[a].crowding > combined[b].crowding;
                return a < b;
            });
            std::size_t budget = pop_size - selected.size();
            if (fi == 0) budget = std::min(budget, std::max<std::size_t>(front_cap, 1));
            for (std::size_t k = 0; k < front.size() && k < budget; ++k)
                selected.push_back(front[k]);
        }
        // The Pareto cap can leave the population short; refill by rank then
        // crowding from the leftovers.
        if (selected.size() < pop_size) {
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < combined.size(); ++i)
                if (std::find(selected.begin(), selected.end(), i) == selected.end())
                    rest.push_back(i);
            std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
                if (combined[a].rank != combined[b].rank) return combined[a].rank < combined[b].rank;
                if (combined[a].crowding != combined[b].crowding)
                    return combined[a].crowding > combined[b].crowding;
                return a < b;
            });
            for (auto i : rest) {
                if (selected.size() >= pop_size) break;
                selected.push_back(i);
            }
        }

        // Modified elitism: the best-fitness individual and the most diverse
        // individual always survive.
        std::size_t best_i = 0, diverse_i = 0;
        for (std::size_t i = 1; i < combined.size(); ++i) {
            if (combined[i].r1 > combined[best_i].r1 ||
                (combined[i].r1 == combined[best_i].r1 &&
                 combined[i].cardinality < combined[best_i].cardinality))
                best_i = i;
            if (combined[i].crowding > combined[diverse_i].crowding) diverse_i = i;
        }
        auto force_in = [&](std::size_t idx, std::size_t slot_from_back) {
            if (std::find(selected.begin(), selected.end(), idx) == selected.end())
                selected[selected.size() - 1 - slot_from_back] = idx;
        };
        force_in(best_i, 0);
        if (diverse_i != best_i) force_in(diverse_i, 1);

        std::vector<Individual> next;
        next.reserve(pop_size);
        for (auto i : selected) next.push_back(std::move(combined[i]));
        pop = std::move(next);

        auto nfronts = nondominated_sort(pop);
        for (const auto& front : nfronts) assign_crowding(pop, front, config.genotype_crowding);
    }

    return result;
}

void write_history_csv(const std::vector<GAHistoryEntry>& history, const std::string& path) {
    auto out = open_out(path);
    out << "generation,best_r1,mean_r1,best_cardinality\n";
    for (const auto& h : history)
        out << h.generation << ',' << format_double(h.best_r1) << ',' << format_double(h.mean_r1)
            << ',' << h.best_cardinality << '\n';
}

}  // namespace nasal
