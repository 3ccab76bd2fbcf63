#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rephase/loadflow.hpp"
#include "rephase/network.hpp"
#include "rephase/objective.hpp"
#include "rephase/optimizer.hpp"
#include "rephase/rng.hpp"

namespace rephase {

enum class ChemotaxisMode {
    /// Redraw only PVs in the highest-unbalance region.
    region,
    /// Redraw a fixed number of PVs picked anywhere in the network.
    classical,
};

struct DbfoaParams {
    int population = 10;           // S
    int chemotaxis_steps = 5;      // N_c
    int swim_length = 5;           // N_r, max random re-phasing tries per step
    int reproduction_steps = 5;    // N_re
    int elimination_steps = 5;     // N_ed
    double dispersal_probability = 0.2;  // P_ed
    int region_radius = 3;         // k_n, bus hops
    std::uint64_t seed = 1;

    ChemotaxisMode mode = ChemotaxisMode::region;
    /// PVs redrawn per classical step; 0 matches the region's PV count.
    int classical_count = 0;
    /// Optional cap on load-flow solves; 0 means no cap.
    std::size_t max_evaluations = 0;
    int threads = 1;

    void validate() const;
    /// Worst-case load-flow solves: S * N_ed * N_re * N_c * (N_r + 1).
    std::size_t evaluation_bound() const;
};

/// Worst-VUF bus (lowest id on ties) and every bus within `radius` hops of it.
/// Returned sorted ascending.
std::vector<int> highest_unbalance_region(const LoadFlowSolution& solution, const Network& net, int radius);

struct ChemotaxisOutcome {
    PVConfigVector vector;
    CostBreakdown cost;        // cost of `vector`
    CostBreakdown start_cost;  // J_last
    std::vector<int> region;   // buses of the region used
    int tries = 0;             // candidate evaluations
    bool accepted = false;
};

/// One D-chemotaxis step: evaluate, locate the highest-unbalance region, then
/// up to `swim_length` times redraw the phases of the PVs in it and accept the
/// first strictly cheaper candidate. Otherwise the input is returned unchanged.
ChemotaxisOutcome d_chemotaxis_step(const PVConfigVector& vector, const Evaluator& evaluator,
                                    const DbfoaParams& params, Rng& rng);

struct PopulationState {
    std::vector<PVConfigVector> vectors;
    /// cost_history[i] holds J(i, 1..N_c+1) for the current reproduction cycle.
    std::vector<std::vector<double>> cost_history;
    PVConfigVector best;
    CostBreakdown best_cost = CostBreakdown::infeasible();
};

/// Replaces the vector with the highest cumulative cost by a copy of the one
/// with the lowest. Ties resolve to the lowest index.
PopulationState d_reproduction(PopulationState state);

/// Independently replaces each vector with a uniform random one with
/// probability p_ed. The best-so-far record is kept.
PopulationState d_elimination_dispersal(PopulationState state, double p_ed, Rng& rng);

/// Full discrete bacterial foraging run. `initial` must hold params.population vectors.
OptimizationResult dbfoa_optimize(const Evaluator& evaluator, const DbfoaParams& params,
                                  std::vector<PVConfigVector> initial);

}  // namespace rephase
