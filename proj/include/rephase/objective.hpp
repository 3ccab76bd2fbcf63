#pragma once

#include <atomic>
#include <cstddef>
#include <limits>

#include "rephase/loadflow.hpp"
#include "rephase/network.hpp"

namespace rephase {

/// Operating limits and penalty weights of the penalized objective.
struct Limits {
    double vuf_max = 1.0;  // percent
    double v_min = 0.94;   // pu
    double v_max = 1.06;   // pu
    double k1 = 10.0;      // weight per percent of VUF violation
    double k2 = 100.0;     // weight per pu of voltage violation

    void validate() const;
};

struct CostBreakdown {
    double mean_vuf = 0.0;             // percent, over all buses
    double vuf_penalty_sum = 0.0;      // sum of VUF violations, percent
    double voltage_penalty_sum = 0.0;  // sum over buses and phases, pu
    double total = 0.0;                // mean_vuf + k1 * vuf_penalty_sum + k2 * voltage_penalty_sum

    // diagnostics, not part of the objective
    double max_vuf = 0.0;
    double min_v = 0.0;
    double max_v = 0.0;
    bool flow_converged = true;

    /// Sentinel for assignments whose load flow failed.
    static CostBreakdown infeasible();
};

double penalty_vuf(double vuf_percent, double vuf_max);
double penalty_voltage(double v_pu, double v_min, double v_max);

/// Objective terms from a solved flow. A non-converged solution maps to
/// CostBreakdown::infeasible().
CostBreakdown cost_of(const LoadFlowSolution& solution, const Limits& limits);

/// Solves the flow for `assignment` and evaluates the penalized objective.
CostBreakdown evaluate(const Snapshot& snapshot, const PVConfigVector& assignment, const Limits& limits,
                       const SolverSettings& settings = {});

struct Evaluation {
    LoadFlowSolution solution;
    CostBreakdown cost;
};

/// Objective bound to one snapshot. Counts every load-flow solve; safe to
/// share between threads.
class Evaluator {
  public:
    Evaluator(const Snapshot& snapshot, Limits limits, SolverSettings settings = {});

    Evaluation evaluate_full(const PVConfigVector& assignment) const;
    CostBreakdown cost(const PVConfigVector& assignment) const { return evaluate_full(assignment).cost; }

    const Snapshot& snapshot() const { return snapshot_; }
    const Network& network() const { return snapshot_.network(); }
    const Limits& limits() const { return limits_; }
    const SolverSettings& settings() const { return settings_; }

    std::size_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }
    void reset_count() { evaluations_.store(0); }

  private:
    Snapshot snapshot_;
    Limits limits_;
    SolverSettings settings_;
    mutable std::atomic<std::size_t> evaluations_{0};
};

}  // namespace rephase
