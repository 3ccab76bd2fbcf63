#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rephase/objective.hpp"
#include "rephase/optimizer.hpp"

namespace rephase {

enum class Algorithm { dbfoa, dga, sfla, hs };

std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// Settings shared by the comparison optimizers. Textbook variants; the
/// rates below are conventional defaults at a population of 10.
struct BaselineParams {
    int max_epochs = 250;
    std::size_t max_evaluations = 0;  // 0 = unlimited
    std::uint64_t seed = 1;

    // genetic algorithm
    double crossover_rate = 0.8;
    double mutation_rate = -1.0;  // per gene; negative means 1 / N_pv
    int tournament_size = 2;

    // shuffled frog leaping
    int memeplexes = 5;

    void validate() const;
};

/// Generational GA: tournament selection, uniform crossover over the phase
/// string, per-gene mutation to a uniform random phase, elitism of one.
/// One epoch is one generation.
OptimizationResult dga_optimize(const Evaluator& evaluator, const BaselineParams& params,
                                std::vector<PVConfigVector> initial);

/// Shuffled frog leaping: frogs ranked and dealt into memeplexes; each
/// memeplex's worst frog copies a random subset of the differing entries of
/// the memeplex best, then of the global best, else is replaced at random.
/// One epoch is one shuffle.
OptimizationResult sfla_optimize(const Evaluator& evaluator, const BaselineParams& params,
                                 std::vector<PVConfigVector> initial);

/// Steepest descent over the 2 * N_pv single re-phasing neighbours. Stops at a
/// local optimum, after max_epochs scans, or when the budget runs out.
OptimizationResult heuristic_search_optimize(const Evaluator& evaluator, const BaselineParams& params,
                                             PVConfigVector start);

}  // namespace rephase
