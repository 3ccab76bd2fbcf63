#include "rephase/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "rephase/rng.hpp"

namespace rephase {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::dbfoa: return "dbfoa";
        case Algorithm::dga: return "dga";
        case Algorithm::sfla: return "sfla";
        case Algorithm::hs: return "hs";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "dbfoa") return Algorithm::dbfoa;
    if (name == "dga") return Algorithm::dga;
    if (name == "sfla") return Algorithm::sfla;
    if (name == "hs") return Algorithm::hs;
    return std::nullopt;
}

void BaselineParams::validate() const {
    if (max_epochs < 1) throw std::invalid_argument("baseline: max_epochs must be >= 1");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
        throw std::invalid_argument("baseline: crossover rate must be in [0, 1]");
    if (mutation_rate > 1.0) throw std::invalid_argument("baseline: mutation rate must be <= 1");
    if (tournament_size < 1) throw std::invalid_argument("baseline: tournament size must be >= 1");
    if (memeplexes < 1) throw std::invalid_argument("baseline: memeplex count must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

// Budget-aware evaluation bookkeeping shared by the baselines.
class Run {
  public:
    Run(const Evaluator& evaluator, std::size_t budget) : evaluator_(evaluator), budget_(budget) {}

    bool can_evaluate(std::size_t n = 1) const { return budget_ == 0 || used_ + n <= budget_; }

    double cost(const PVConfigVector& v) {
        const CostBreakdown c = evaluator_.cost(v);
        ++used_;
        if (result.best.phases.empty() || c.total < result.best_cost.total) {
            result.best = v;
            result.best_cost = c;
        }
        return c.total;
    }

    void record(int epoch, double mean) {
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0_).count();
        result.trace.entries.push_back({epoch, result.best_cost.total, mean, ms});
    }

    OptimizationResult finish() {
        result.evaluations = used_;
        return std::move(result);
    }

    OptimizationResult result;

  private:
    const Evaluator& evaluator_;
    std::size_t budget_;
    std::size_t used_ = 0;
    Clock::time_point t0_ = Clock::now();
};

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void check_population(const Evaluator& evaluator, const std::vector<PVConfigVector>& pop) {
    if (pop.empty()) throw std::invalid_argument("baseline: initial population is empty");
    for (const auto& v : pop)
        if (v.size() != evaluator.network().pv_count())
            throw std::invalid_argument("baseline: vector length must equal the PV count");
}

std::size_t argmin(const std::vector<double>& xs) {
    return static_cast<std::size_t>(std::min_element(xs.begin(), xs.end()) - xs.begin());
}

// Copies a random non-empty subset of the entries where `from` and `to` differ.
bool leap_toward(PVConfigVector& frog, const PVConfigVector& target, Rng& rng) {
    std::vector<std::size_t> diff;
    for (std::size_t m = 0; m < frog.size(); ++m)
        if (frog[m] != target[m]) diff.push_back(m);
    if (diff.empty()) return false;
    const std::size_t count = 1 + rng.below(diff.size());
    for (std::size_t t = 0; t < count; ++t) {
        std::swap(diff[t], diff[t + rng.below(diff.size() - t)]);
        frog[diff[t]] = target[diff[t]];
    }
    return true;
}

}  // namespace

OptimizationResult dga_optimize(const Evaluator& evaluator, const BaselineParams& params,
                                std::vector<PVConfigVector> initial) {
    params.validate();
    check_population(evaluator, initial);
    const std::size_t s = initial.size();
    const std::size_t n = evaluator.network().pv_count();
    const double mutation = params.mutation_rate >= 0.0 ? params.mutation_rate : (n ? 1.0 / n : 0.0);
    Rng rng(params.seed);
    Run run(evaluator, params.max_evaluations);

    std::vector<PVConfigVector> pop = std::move(initial);
    std::vector<double> cost;
    for (const auto& v : pop) {
        if (!run.can_evaluate()) break;
        cost.push_back(run.cost(v));
    }
    pop.resize(cost.size());
    if (pop.empty()) return run.finish();
    run.record(0, mean_of(cost));

    auto tournament = [&]() -> const PVConfigVector& {
        std::size_t winner = rng.below(pop.size());
        for (int t = 1; t < params.tournament_size; ++t) {
            const std::size_t other = rng.below(pop.size());
            if (cost[other] < cost[winner]) winner = other;
        }
        return pop[winner];
    };

    for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
        if (s < 2 || !run.can_evaluate(s - 1)) break;
        const std::size_t elite = argmin(cost);
        std::vector<PVConfigVector> next{pop[elite]};
        std::vector<double> next_cost{cost[elite]};
        while (next.size() < s) {
            PVConfigVector child = tournament();
            const PVConfigVector& other = tournament();
            if (rng.uniform01() < params.crossover_rate)
                for (std::size_t g = 0; g < n; ++g)
                    if (rng.uniform01() < 0.5) child[g] = other[g];
            for (std::size_t g = 0; g < n; ++g)
                if (rng.uniform01() < mutation) child[g] = rng.phase();
            next_cost.push_back(run.cost(child));
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        cost = std::move(next_cost);
        run.record(epoch, mean_of(cost));
    }
    return run.finish();
}

OptimizationResult sfla_optimize(const Evaluator& evaluator, const BaselineParams& params,
                                 std::vector<PVConfigVector> initial) {
    params.validate();
    check_population(evaluator, initial);
    const std::size_t n = evaluator.network().pv_count();
    Rng rng(params.seed);
    Run run(evaluator, params.max_evaluations);

    std::vector<PVConfigVector> frogs = std::move(initial);
    std::vector<double> cost;
    for (const auto& v : frogs) {
        if (!run.can_evaluate()) break;
        cost.push_back(run.cost(v));
    }
    frogs.resize(cost.size());
    if (frogs.empty()) return run.finish();
    run.record(0, mean_of(cost));
    const std::size_t s = frogs.size();
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(params.memeplexes), s);

    bool exhausted = false;
    for (int epoch = 1; epoch <= params.max_epochs && !exhausted; ++epoch) {
        // shuffle: rank all frogs and deal them round-robin into memeplexes
        std::vector<std::size_t> rank(s);
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) { return cost[x] < cost[y]; });
        const std::size_t global_best = rank.front();

        for (std::size_t q = 0; q < m && !exhausted; ++q) {
            std::vector<std::size_t> members;
            for (std::size_t r = q; r < s; r += m) members.push_back(rank[r]);
            std::size_t best = members.front();
            std::size_t worst = members.front();
            for (std::size_t idx : members) {
                if (cost[idx] < cost[best]) best = idx;
                if (cost[idx] >= cost[worst]) worst = idx;
            }
            if (worst == best && members.size() > 1) worst = members.back();

            bool improved = false;
            for (std::size_t leader : {best, global_best}) {
                if (leader == worst) continue;
                PVConfigVector candidate = frogs[worst];
                if (!leap_toward(candidate, frogs[leader], rng)) continue;
                if (!run.can_evaluate()) {
                    exhausted = true;
                    break;
                }
                const double c = run.cost(candidate);
                if (c < cost[worst]) {
                    frogs[worst] = std::move(candidate);
                    cost[worst] = c;
                    improved = true;
                    break;
                }
            }
            if (improved || exhausted) continue;
            if (!run.can_evaluate()) {
                exhausted = true;
                break;
            }
            frogs[worst] = random_assignment(n, rng);
            cost[worst] = run.cost(frogs[worst]);
        }
        run.record(epoch, mean_of(cost));
    }
    return run.finish();
}

OptimizationResult heuristic_search_optimize(const Evaluator& evaluator, const BaselineParams& params,
                                             PVConfigVector start) {
    params.validate();
    const std::size_t n = evaluator.network().pv_count();
    if (start.size() != n) throw std::invalid_argument("heuristic search: start length must equal the PV count");
    Run run(evaluator, params.max_evaluations);
    if (!run.can_evaluate()) return run.finish();

    PVConfigVector current = std::move(start);
    double current_cost = run.cost(current);
    run.record(0, current_cost);

    for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
        PVConfigVector best_move;
        double best_move_cost = current_cost;
        std::vector<double> seen;
        bool out_of_budget = false;
        for (std::size_t m = 0; m < n && !out_of_budget; ++m) {
            for (Phase p : kPhases) {
                if (p == current[m]) continue;
                if (!run.can_evaluate()) {
                    out_of_budget = true;
                    break;
                }
                PVConfigVector neighbour = current;
                neighbour[m] = p;
                const double c = run.cost(neighbour);
                seen.push_back(c);
                if (c < best_move_cost) {
                    best_move_cost = c;
                    best_move = std::move(neighbour);
                }
            }
        }
        if (seen.empty()) break;
        const bool moved = !best_move.phases.empty();
        if (moved) {
            current = std::move(best_move);
            current_cost = best_move_cost;
        }
        run.record(epoch, mean_of(seen));
        if (!moved || out_of_budget) break;
    }
    return run.finish();
}

}  // namespace rephase
