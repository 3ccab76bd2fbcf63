#include "rephase/dbfoa.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace rephase {

void DbfoaParams::validate() const {
    if (population < 1 || chemotaxis_steps < 1 || swim_length < 1 || reproduction_steps < 1 ||
        elimination_steps < 1)
        throw std::invalid_argument("dbfoa: all step counts and the population must be >= 1");
    if (!(dispersal_probability >= 0.0 && dispersal_probability <= 1.0))
        throw std::invalid_argument("dbfoa: dispersal probability must be in [0, 1]");
    if (region_radius < 0) throw std::invalid_argument("dbfoa: region radius must be >= 0");
    if (classical_count < 0) throw std::invalid_argument("dbfoa: classical count must be >= 0");
}

std::size_t DbfoaParams::evaluation_bound() const {
    return static_cast<std::size_t>(population) * elimination_steps * reproduction_steps * chemotaxis_steps *
           (static_cast<std::size_t>(swim_length) + 1);
}

std::vector<int> highest_unbalance_region(const LoadFlowSolution& solution, const Network& net, int radius) {
    int worst = 0;
    for (int b = 1; b < net.bus_count(); ++b)
        if (solution.vuf_percent[b] > solution.vuf_percent[worst]) worst = b;

    std::vector<int> hops(net.bus_count(), -1);
    std::vector<int> region;
    std::queue<int> frontier;
    hops[worst] = 0;
    frontier.push(worst);
    while (!frontier.empty()) {
        const int bus = frontier.front();
        frontier.pop();
        region.push_back(bus);
        if (hops[bus] == radius) continue;
        auto visit = [&](int next) {
            if (next < 0 || hops[next] >= 0) return;
            hops[next] = hops[bus] + 1;
            frontier.push(next);
        };
        visit(net.parent(bus));
        for (int child : net.children(bus)) visit(child);
    }
    std::sort(region.begin(), region.end());
    return region;
}

ChemotaxisOutcome d_chemotaxis_step(const PVConfigVector& vector, const Evaluator& evaluator,
                                    const DbfoaParams& params, Rng& rng) {
    const Network& net = evaluator.network();
    const Evaluation start = evaluator.evaluate_full(vector);

    ChemotaxisOutcome out;
    out.vector = vector;
    out.cost = start.cost;
    out.start_cost = start.cost;
    out.region = highest_unbalance_region(start.solution, net, params.region_radius);

    std::vector<int> region_pvs;
    for (int bus : out.region)
        for (int pv : net.pv_at(bus)) region_pvs.push_back(pv);
    std::sort(region_pvs.begin(), region_pvs.end());

    std::size_t redraw_count = region_pvs.size();
    if (params.mode == ChemotaxisMode::classical && params.classical_count > 0)
        redraw_count = std::min<std::size_t>(params.classical_count, net.pv_count());
    if (redraw_count == 0) return out;

    std::vector<int> all_pvs;
    if (params.mode == ChemotaxisMode::classical) {
        all_pvs.resize(net.pv_count());
        std::iota(all_pvs.begin(), all_pvs.end(), 0);
    }

    const double j_last = start.cost.total;
    for (int r = 0; r < params.swim_length; ++r) {
        PVConfigVector candidate = vector;
        if (params.mode == ChemotaxisMode::region) {
            for (int pv : region_pvs) candidate[pv] = rng.phase();
        } else {
            // partial Fisher-Yates: the first redraw_count entries are a random subset
            for (std::size_t m = 0; m < redraw_count; ++m) {
                std::swap(all_pvs[m], all_pvs[m + rng.below(all_pvs.size() - m)]);
                candidate[all_pvs[m]] = rng.phase();
            }
        }
        const CostBreakdown cost = evaluator.cost(candidate);
        ++out.tries;
        if (cost.total < j_last) {
            out.vector = std::move(candidate);
            out.cost = cost;
            out.accepted = true;
            return out;
        }
    }
    return out;
}

PopulationState d_reproduction(PopulationState state) {
    const std::size_t s = state.vectors.size();
    if (s <= 1 || state.cost_history.size() != s) return state;
    std::vector<double> cumulative(s);
    for (std::size_t i = 0; i < s; ++i)
        cumulative[i] = std::accumulate(state.cost_history[i].begin(), state.cost_history[i].end(), 0.0);
    std::size_t worst = 0, best = 0;
    for (std::size_t i = 1; i < s; ++i) {
        if (cumulative[i] > cumulative[worst]) worst = i;
        if (cumulative[i] < cumulative[best]) best = i;
    }
    state.vectors[worst] = state.vectors[best];
    state.cost_history[worst] = state.cost_history[best];
    return state;
}

PopulationState d_elimination_dispersal(PopulationState state, double p_ed, Rng& rng) {
    for (auto& v : state.vectors) {
        const double u = 1.0 - rng.uniform01();  // (0, 1]
        if (u <= p_ed) v = random_assignment(v.size(), rng);
    }
    return state;
}

namespace {

using Clock = std::chrono::steady_clock;

void record_best(PopulationState& state, const PVConfigVector& v, const CostBreakdown& c) {
    if (state.best.phases.empty() || c.total < state.best_cost.total) {
        state.best = v;
        state.best_cost = c;
    }
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

OptimizationResult dbfoa_optimize(const Evaluator& evaluator, const DbfoaParams& params,
                                  std::vector<PVConfigVector> initial) {
    params.validate();
    const std::size_t s = static_cast<std::size_t>(params.population);
    if (initial.size() != s) throw std::invalid_argument("dbfoa: initial population size must equal S");
    for (const auto& v : initial)
        if (v.size() != evaluator.network().pv_count())
            throw std::invalid_argument("dbfoa: initial vector length must equal the PV count");

    PopulationState state;
    state.vectors = std::move(initial);
    OptimizationResult result;
    std::size_t used = 0;
    bool exhausted = false;
    int epoch = 0;
    const auto t0 = Clock::now();
    auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); };

    for (int l = 0; l < params.elimination_steps && !exhausted; ++l) {
        for (int k = 0; k < params.reproduction_steps && !exhausted; ++k) {
            state.cost_history.assign(s, {});
            for (int j = 0; j < params.chemotaxis_steps && !exhausted; ++j) {
                std::vector<ChemotaxisOutcome> outcomes(s);
                std::vector<char> done(s, 0);
                auto run_step = [&](std::size_t i, const DbfoaParams& p) {
                    Rng rng(derive_seed(params.seed, {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(k),
                                                      static_cast<std::uint64_t>(j), i}));
                    outcomes[i] = d_chemotaxis_step(state.vectors[i], evaluator, p, rng);
                    done[i] = 1;
                };

                const std::size_t worst_case = s * (static_cast<std::size_t>(params.swim_length) + 1);
                if (params.max_evaluations == 0 || params.max_evaluations - used >= worst_case) {
                    // vectors are independent within one pass
                    parallel_for(s, params.threads, [&](std::size_t i) { run_step(i, params); });
                    for (const auto& o : outcomes) used += 1 + static_cast<std::size_t>(o.tries);
                } else {
                    for (std::size_t i = 0; i < s; ++i) {
                        const std::size_t remaining = params.max_evaluations - used;
                        // a lone J_last evaluation cannot move the vector
                        if (remaining < 2) {
                            exhausted = true;
                            break;
                        }
                        DbfoaParams p = params;
                        p.swim_length = static_cast<int>(
                            std::min<std::size_t>(static_cast<std::size_t>(params.swim_length), remaining - 1));
                        run_step(i, p);
                        used += 1 + static_cast<std::size_t>(outcomes[i].tries);
                    }
                }

                std::vector<double> start_costs, costs;
                for (std::size_t i = 0; i < s; ++i) {
                    if (!done[i]) continue;
                    const auto& o = outcomes[i];
                    if (j == 0) state.cost_history[i].push_back(o.start_cost.total);
                    state.cost_history[i].push_back(o.cost.total);
                    state.vectors[i] = o.vector;
                    record_best(state, o.vector, o.cost);
                    start_costs.push_back(o.start_cost.total);
                    costs.push_back(o.cost.total);
                }
                if (start_costs.empty()) break;
                if (epoch == 0) {
                    const double first_best = *std::min_element(start_costs.begin(), start_costs.end());
                    result.trace.entries.push_back({0, first_best, mean_of(start_costs), 0.0});
                }
                ++epoch;
                result.trace.entries.push_back({epoch, state.best_cost.total, mean_of(costs), elapsed_ms()});
            }
            if (!exhausted) state = d_reproduction(std::move(state));
        }
        if (!exhausted) {
            Rng rng(derive_seed(params.seed, {static_cast<std::uint64_t>(l), 0xEDULL}));
            state = d_elimination_dispersal(std::move(state), params.dispersal_probability, rng);
        }
    }

    result.best = state.best;
    result.best_cost = state.best_cost;
    result.evaluations = used;
    return result;
}

}  // namespace rephase
