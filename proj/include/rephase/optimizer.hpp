#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "rephase/objective.hpp"
#include "rephase/phase.hpp"
#include "rephase/rng.hpp"

namespace rephase {

/// One row of a convergence trace. Epoch 0 describes the initial population.
struct TraceEntry {
    int epoch = 0;
    double best_cost = 0.0;  // best-so-far
    double mean_cost = 0.0;  // current population (or neighbourhood) mean
    double wall_ms = 0.0;
};

struct ConvergenceTrace {
    std::vector<TraceEntry> entries;

    bool non_increasing() const;
    /// First epoch at which the final best cost was reached.
    int epochs_to_best() const;
};

/// CSV "epoch,best_cost,mean_cost,wall_ms". Timing is written as 0 unless
/// requested, which keeps repeated runs byte-identical.
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, bool with_timing = false);

struct OptimizationResult {
    PVConfigVector best;
    CostBreakdown best_cost;
    ConvergenceTrace trace;
    std::size_t evaluations = 0;
};

/// Uniform random assignment over {a,b,c}^n.
PVConfigVector random_assignment(std::size_t n, Rng& rng);
std::vector<PVConfigVector> random_population(std::size_t pv_count, int size, std::uint64_t seed);

/// Runs fn(0..count-1) on up to `threads` workers. Each index must be independent.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace rephase
