#include "rephase/objective.hpp"

#include <algorithm>
#include <stdexcept>

namespace rephase {

void Limits::validate() const {
    if (!(v_min < v_max)) throw std::invalid_argument("limits: v_min must be below v_max");
    if (!(vuf_max > 0.0)) throw std::invalid_argument("limits: vuf_max must be > 0");
    if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw std::invalid_argument("limits: penalty weights must be >= 0");
}

CostBreakdown CostBreakdown::infeasible() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    CostBreakdown c;
    c.mean_vuf = c.vuf_penalty_sum = c.voltage_penalty_sum = c.total = inf;
    c.max_vuf = inf;
    c.min_v = 0.0;
    c.max_v = inf;
    c.flow_converged = false;
    return c;
}

double penalty_vuf(double vuf_percent, double vuf_max) {
    return vuf_percent > vuf_max ? vuf_percent - vuf_max : 0.0;
}

double penalty_voltage(double v_pu, double v_min, double v_max) {
    if (v_pu < v_min) return v_min - v_pu;
    if (v_pu > v_max) return v_pu - v_max;
    return 0.0;
}

CostBreakdown cost_of(const LoadFlowSolution& solution, const Limits& limits) {
    if (!solution.converged()) return CostBreakdown::infeasible();
    CostBreakdown c;
    const std::size_t n = solution.vuf_percent.size();
    c.min_v = std::numeric_limits<double>::infinity();
    c.max_v = 0.0;
    double vuf_sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        const double u = solution.vuf_percent[b];
        vuf_sum += u;
        c.max_vuf = std::max(c.max_vuf, u);
        c.vuf_penalty_sum += penalty_vuf(u, limits.vuf_max);
        for (double v : solution.phase_pu[b]) {
            c.voltage_penalty_sum += penalty_voltage(v, limits.v_min, limits.v_max);
            c.min_v = std::min(c.min_v, v);
            c.max_v = std::max(c.max_v, v);
        }
    }
    c.mean_vuf = n ? vuf_sum / static_cast<double>(n) : 0.0;
    c.total = c.mean_vuf + limits.k1 * c.vuf_penalty_sum + limits.k2 * c.voltage_penalty_sum;
    return c;
}

CostBreakdown evaluate(const Snapshot& snapshot, const PVConfigVector& assignment, const Limits& limits,
                       const SolverSettings& settings) {
    return cost_of(solve_unchecked(snapshot, assignment, settings), limits);
}

Evaluator::Evaluator(const Snapshot& snapshot, Limits limits, SolverSettings settings)
    : snapshot_(snapshot), limits_(limits), settings_(settings) {
    limits_.validate();
    settings_.validate();
}

Evaluation Evaluator::evaluate_full(const PVConfigVector& assignment) const {
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    Evaluation e;
    e.solution = solve_unchecked(snapshot_, assignment, settings_);
    e.cost = cost_of(e.solution, limits_);
    return e;
}

}  // namespace rephase
