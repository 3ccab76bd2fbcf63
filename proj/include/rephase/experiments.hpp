#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rephase/baselines.hpp"
#include "rephase/dbfoa.hpp"
#include "rephase/initializer.hpp"
#include "rephase/loadflow.hpp"
#include "rephase/network.hpp"
#include "rephase/objective.hpp"

namespace rephase {

/// Settings shared by every experiment harness.
struct ExperimentConfig {
    Limits limits;
    SolverSettings solver;
    DbfoaParams dbfoa;
    BaselineParams baseline;
    InitializerParams initializer;
    Algorithm algorithm = Algorithm::dbfoa;
    std::uint64_t seed = 42;
    /// Seed the population with the power-balance initializer (else uniform random).
    bool power_balance_init = true;
    /// Cap on load-flow solves per optimization; 0 uses the DBFOA worst-case bound.
    std::size_t budget = 0;
    /// Record wall time in traces. Off by default so reruns are byte-identical.
    bool timing = false;
    /// Workers for independent hours / Monte-Carlo runs.
    int threads = 1;

    std::size_t effective_budget() const { return budget ? budget : dbfoa.evaluation_bound(); }
};

/// Initial population of size S for `snapshot`, with the installed phase
/// configuration always placed at index 0.
std::vector<PVConfigVector> initial_population(const Snapshot& snapshot, const ExperimentConfig& cfg,
                                               std::uint64_t seed);

/// Runs `algorithm` from `initial` with at most `budget` load-flow solves
/// (0 = the algorithm's own limits). Heuristic search starts from the
/// cheapest member of `initial`; ranking it counts toward the budget.
OptimizationResult run_algorithm(Algorithm algorithm, const Evaluator& evaluator, const ExperimentConfig& cfg,
                                 std::vector<PVConfigVector> initial, std::size_t budget, std::uint64_t seed);

/// Fixed-versus-optimized outcome for one snapshot.
struct HourOutcome {
    int hour = -1;
    PVConfigVector fixed;
    PVConfigVector optimized;
    Evaluation fixed_eval;
    Evaluation optimized_eval;
    OptimizationResult result;
    /// False when the snapshot has no PV output, so every assignment is equivalent.
    bool optimized_run = false;
};

/// Optimizes one snapshot. Snapshots without PV output skip the search and
/// report the installed configuration for both modes.
HourOutcome optimize_snapshot(const Snapshot& snapshot, const ExperimentConfig& cfg, std::uint64_t seed);

// Each harness writes its CSV files into `out_dir` (created if needed).

/// trace.csv, report.csv, bus_vuf.csv, solution.csv
HourOutcome run_experiment(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles, int hour,
                           const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// phases.csv, phase_changes.csv, hourly.csv, vuf_distribution.csv,
/// voltage_distribution.csv
std::vector<HourOutcome> sweep_experiment(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                                          const std::vector<int>& hours, const ExperimentConfig& cfg,
                                          const std::filesystem::path& out_dir);

struct CapacityOptions {
    double step_kw = 5.4;
    int steps = 30;
    int mc_runs = 20;
    int first_hour = 8;
    int last_hour = 17;
};

struct CapacityRow {
    double capacity_kw = 0.0;  // total installed PV
    std::string mode;          // "fixed" or "rephased"
    double max_vuf = 0.0;      // worst over runs and daytime hours
    double max_v = 0.0;
    double mean_max_vuf = 0.0;  // per-run worst, averaged over runs
    double mean_max_v = 0.0;
    int runs = 0;
};

struct UsableCapacity {
    std::string mode;
    double capacity_kw = 0.0;  // 0 when even the base network violates a limit
    double increase_percent = 0.0;
};

struct CapacityReport {
    std::vector<CapacityRow> rows;
    std::vector<UsableCapacity> usable;
};

/// capacity.csv, usable.csv. Each Monte-Carlo run adds `steps` PV units one
/// at a time at random buses; every intermediate network is evaluated over
/// the daytime hours with and without re-phasing.
CapacityReport capacity_study(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                              const CapacityOptions& options, const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir);

struct BenchmarkRun {
    Algorithm algorithm = Algorithm::dbfoa;
    std::uint64_t seed = 0;
    double final_cost = 0.0;
    int epochs_to_best = 0;
    std::size_t evaluations = 0;
};

struct AblationRow {
    std::uint64_t seed = 0;
    double random_init_best = 0.0;
    double balanced_init_best = 0.0;
    double init_cost_ratio = 0.0;  // balanced / random
    double region_final = 0.0;
    double classical_final = 0.0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRun> runs;
    std::vector<AblationRow> ablation;
};

/// traces/<algo>_seed<seed>.csv, summary.csv, ablation.csv. All algorithms
/// of one seed start from the same population. When DBFOA is listed it runs
/// first and the others receive exactly the number of solves it used.
BenchmarkReport benchmark_experiment(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                                     int hour, const std::vector<Algorithm>& algorithms,
                                     const std::vector<std::uint64_t>& seeds, const ExperimentConfig& cfg,
                                     bool ablation, const std::filesystem::path& out_dir);

struct ValidationRow {
    int hour = 0;
    SolveStatus status = SolveStatus::converged;
    int iterations = 0;
    CostBreakdown cost;
};

/// Solves the installed configuration at every hour. Writes validate.csv when
/// `out_dir` is non-empty.
std::vector<ValidationRow> validate_dataset(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                                            const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

double median(std::vector<double> values);

}  // namespace rephase
