#include "rephase/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "rephase/csv.hpp"
#include "rephase/optimizer.hpp"
#include "rephase/rng.hpp"

namespace rephase {

namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void ensure_dir(const fs::path& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

std::vector<std::string> cost_fields(const CostBreakdown& c) {
    return {csv::num(c.total, 8),           csv::num(c.mean_vuf, 8), csv::num(c.vuf_penalty_sum, 8),
            csv::num(c.voltage_penalty_sum, 8), csv::num(c.max_vuf, 8), csv::num(c.min_v, 8),
            csv::num(c.max_v, 8),           c.flow_converged ? "1" : "0"};
}

const std::vector<std::string> kCostHeader{"total",   "mean_vuf", "vuf_penalty_sum", "voltage_penalty_sum",
                                           "max_vuf", "min_v",    "max_v",           "converged"};

void append(std::vector<std::string>& to, const std::vector<std::string>& more) {
    to.insert(to.end(), more.begin(), more.end());
}

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSearchStream = 2;

}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PVConfigVector> initial_population(const Snapshot& snapshot, const ExperimentConfig& cfg,
                                               std::uint64_t seed) {
    const std::uint64_t init_seed = derive_seed(seed, {kInitStream});
    auto pop = cfg.power_balance_init
                   ? power_balance_population(snapshot, cfg.dbfoa.population, init_seed, cfg.initializer)
                   : random_population(snapshot.network().pv_count(), cfg.dbfoa.population, init_seed);
    if (!pop.empty()) pop.front() = snapshot.network().default_assignment();
    return pop;
}

OptimizationResult run_algorithm(Algorithm algorithm, const Evaluator& evaluator, const ExperimentConfig& cfg,
                                 std::vector<PVConfigVector> initial, std::size_t budget, std::uint64_t seed) {
    const std::uint64_t search_seed = derive_seed(seed, {kSearchStream});
    BaselineParams base = cfg.baseline;
    base.seed = search_seed;
    base.max_evaluations = budget;
    // with a budget the solve count, not the epoch count, ends the run
    if (budget > 0) base.max_epochs = static_cast<int>(std::min<std::size_t>(budget, 1u << 30));

    switch (algorithm) {
        case Algorithm::dbfoa: {
            DbfoaParams p = cfg.dbfoa;
            p.seed = search_seed;
            p.max_evaluations = budget;
            return dbfoa_optimize(evaluator, p, std::move(initial));
        }
        case Algorithm::dga: return dga_optimize(evaluator, base, std::move(initial));
        case Algorithm::sfla: return sfla_optimize(evaluator, base, std::move(initial));
        case Algorithm::hs: {
            if (initial.empty()) throw std::invalid_argument("heuristic search: empty initial population");
            std::size_t ranked = 0;
            std::size_t best = 0;
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < initial.size(); ++i) {
                if (budget > 0 && ranked + 1 >= budget) break;
                const double c = evaluator.cost(initial[i]).total;
                ++ranked;
                if (c < best_cost) {
                    best_cost = c;
                    best = i;
                }
            }
            if (budget > 0) base.max_evaluations = budget - ranked;
            OptimizationResult r = heuristic_search_optimize(evaluator, base, initial[best]);
            r.evaluations += ranked;
            return r;
        }
    }
    throw std::invalid_argument("unknown algorithm");
}

HourOutcome optimize_snapshot(const Snapshot& snapshot, const ExperimentConfig& cfg, std::uint64_t seed) {
    Evaluator evaluator(snapshot, cfg.limits, cfg.solver);
    HourOutcome out;
    out.hour = snapshot.hour();
    out.fixed = snapshot.network().default_assignment();
    out.fixed_eval = evaluator.evaluate_full(out.fixed);

    if (snapshot.total_pv_kw() <= 0.0 || snapshot.network().pv_count() == 0) {
        out.optimized = out.fixed;
        out.optimized_eval = out.fixed_eval;
        out.result.best = out.fixed;
        out.result.best_cost = out.fixed_eval.cost;
        out.result.trace.entries.push_back({0, out.fixed_eval.cost.total, out.fixed_eval.cost.total, 0.0});
        out.result.evaluations = 1;
        return out;
    }

    out.result = run_algorithm(cfg.algorithm, evaluator, cfg, initial_population(snapshot, cfg, seed),
                               cfg.effective_budget(), seed);
    out.optimized_run = true;
    out.optimized = out.result.best;
    if (out.result.best_cost.total > out.fixed_eval.cost.total) out.optimized = out.fixed;
    out.optimized_eval = evaluator.evaluate_full(out.optimized);
    return out;
}

HourOutcome run_experiment(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles, int hour,
                           const ExperimentConfig& cfg, const fs::path& out_dir) {
    const Snapshot snapshot = make_snapshot(net, profiles, hour);
    HourOutcome out = optimize_snapshot(snapshot, cfg, derive_seed(cfg.seed, {static_cast<std::uint64_t>(hour)}));
    if (!std::isfinite(out.optimized_eval.cost.total))
        throw LoadFlowError(out.optimized_eval.solution.status, out.optimized_eval.solution.mismatch,
                            "no assignment with a converged load flow at hour " + std::to_string(hour));

    ensure_dir(out_dir);
    {
        auto f = open_csv(out_dir / "trace.csv");
        write_trace_csv(f, out.result.trace, cfg.timing);
    }
    {
        auto f = open_csv(out_dir / "report.csv");
        std::vector<std::string> header{"hour", "algorithm", "mode"};
        append(header, kCostHeader);
        header.insert(header.end(), {"evaluations", "phases"});
        csv::row(f, header);
        for (int m = 0; m < 2; ++m) {
            const bool opt = m == 1;
            std::vector<std::string> fields{std::to_string(hour), to_string(cfg.algorithm),
                                            opt ? "optimized" : "fixed"};
            append(fields, cost_fields(opt ? out.optimized_eval.cost : out.fixed_eval.cost));
            fields.push_back(std::to_string(opt ? out.result.evaluations : 1));
            fields.push_back((opt ? out.optimized : out.fixed).to_string());
            csv::row(f, fields);
        }
    }
    {
        auto f = open_csv(out_dir / "bus_vuf.csv");
        csv::row(f, {"bus", "vuf_fixed", "vuf_optimized", "vmin_fixed", "vmax_fixed", "vmin_optimized",
                     "vmax_optimized"});
        const auto& fs_ = out.fixed_eval.solution;
        const auto& os_ = out.optimized_eval.solution;
        for (int b = 0; b < net->bus_count(); ++b) {
            const auto& pf = fs_.phase_pu[b];
            const auto& po = os_.phase_pu[b];
            csv::row(f, {std::to_string(b), csv::num(fs_.vuf_percent[b], 8), csv::num(os_.vuf_percent[b], 8),
                         csv::num(*std::min_element(pf.begin(), pf.end()), 8),
                         csv::num(*std::max_element(pf.begin(), pf.end()), 8),
                         csv::num(*std::min_element(po.begin(), po.end()), 8),
                         csv::num(*std::max_element(po.begin(), po.end()), 8)});
        }
    }
    {
        auto f = open_csv(out_dir / "solution.csv");
        write_solution_csv(f, out.optimized_eval.solution, net->base());
    }
    return out;
}

std::vector<HourOutcome> sweep_experiment(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                                          const std::vector<int>& hours, const ExperimentConfig& cfg,
                                          const fs::path& out_dir) {
    for (int h : hours)
        if (h < 0 || h > 23) throw std::out_of_range("sweep: hour " + std::to_string(h) + " outside 0..23");

    std::vector<HourOutcome> outcomes(hours.size());
    parallel_for(hours.size(), cfg.threads, [&](std::size_t i) {
        const Snapshot snapshot = make_snapshot(net, profiles, hours[i]);
        outcomes[i] = optimize_snapshot(snapshot, cfg, derive_seed(cfg.seed, {static_cast<std::uint64_t>(hours[i])}));
    });

    ensure_dir(out_dir);
    const std::size_t n_pv = net->pv_count();
    {
        auto f = open_csv(out_dir / "phases.csv");
        std::vector<std::string> header{"hour"};
        for (const auto& pv : net->pv_units()) header.push_back("PV" + std::to_string(pv.id));
        csv::row(f, header);
        for (const auto& o : outcomes) {
            std::vector<std::string> row{std::to_string(o.hour)};
            for (Phase p : o.optimized.phases) row.emplace_back(1, to_char(p));
            csv::row(f, row);
        }
    }
    {
        // unchanged = 1 when the PV keeps the phase it had in the previous listed hour
        auto f = open_csv(out_dir / "phase_changes.csv");
        csv::row(f, {"hour", "pv", "phase", "unchanged"});
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            for (std::size_t m = 0; m < n_pv; ++m) {
                const Phase p = outcomes[i].optimized[m];
                const bool same = i > 0 && outcomes[i - 1].optimized[m] == p;
                csv::row(f, {std::to_string(outcomes[i].hour), std::to_string(net->pv_units()[m].id),
                             std::string(1, to_char(p)), same ? "1" : "0"});
            }
    }
    {
        auto f = open_csv(out_dir / "hourly.csv");
        std::vector<std::string> header{"hour", "pv_kw", "optimized_run", "evaluations"};
        for (const char* mode : {"fixed", "optimized"})
            for (const auto& h : kCostHeader) header.push_back(std::string(mode) + "_" + h);
        csv::row(f, header);
        for (const auto& o : outcomes) {
            const Snapshot snapshot = make_snapshot(net, profiles, o.hour);
            std::vector<std::string> row{std::to_string(o.hour), csv::num(snapshot.total_pv_kw(), 4),
                                         o.optimized_run ? "1" : "0", std::to_string(o.result.evaluations)};
            append(row, cost_fields(o.fixed_eval.cost));
            append(row, cost_fields(o.optimized_eval.cost));
            csv::row(f, row);
        }
    }
    {
        auto f = open_csv(out_dir / "vuf_distribution.csv");
        csv::row(f, {"hour", "mode", "bus", "vuf"});
        for (const auto& o : outcomes)
            for (int m = 0; m < 2; ++m) {
                const auto& sol = m ? o.optimized_eval.solution : o.fixed_eval.solution;
                for (std::size_t b = 0; b < sol.vuf_percent.size(); ++b)
                    csv::row(f, {std::to_string(o.hour), m ? "optimized" : "fixed", std::to_string(b),
                                 csv::num(sol.vuf_percent[b], 8)});
            }
    }
    {
        auto f = open_csv(out_dir / "voltage_distribution.csv");
        csv::row(f, {"hour", "mode", "bus", "phase", "v_pu"});
        for (const auto& o : outcomes)
            for (int m = 0; m < 2; ++m) {
                const auto& sol = m ? o.optimized_eval.solution : o.fixed_eval.solution;
                for (std::size_t b = 0; b < sol.phase_pu.size(); ++b)
                    for (std::size_t ph = 0; ph < 3; ++ph)
                        csv::row(f, {std::to_string(o.hour), m ? "optimized" : "fixed", std::to_string(b),
                                     std::string(1, to_char(phase_at(ph))), csv::num(sol.phase_pu[b][ph], 8)});
            }
    }
    return outcomes;
}

CapacityReport capacity_study(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                              const CapacityOptions& options, const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (!(options.step_kw > 0.0)) throw std::invalid_argument("capacity study: step must be > 0 kW");
    if (options.steps < 0) throw std::invalid_argument("capacity study: steps must be >= 0");
    if (options.mc_runs < 1) throw std::invalid_argument("capacity study: at least one Monte-Carlo run required");
    if (options.first_hour < 0 || options.last_hour > 23 || options.first_hour > options.last_hour)
        throw std::invalid_argument("capacity study: invalid daytime window");

    const std::size_t steps = static_cast<std::size_t>(options.steps) + 1;
    const std::size_t runs = static_cast<std::size_t>(options.mc_runs);
    // worst[run][step][mode] = {max_vuf, max_v}
    std::vector<std::vector<std::array<std::array<double, 2>, 2>>> worst(
        runs, std::vector<std::array<std::array<double, 2>, 2>>(steps));
    std::vector<double> capacity(steps);

    parallel_for(runs, cfg.threads, [&](std::size_t r) {
        auto current = net;
        for (std::size_t s = 0; s < steps; ++s) {
            if (s > 0)
                current = std::make_shared<const Network>(
                    add_random_pv(*current, options.step_kw, derive_seed(cfg.seed, {0xCA, r, s})));
            if (r == 0) capacity[s] = current->total_pv_kw();
            std::array<std::array<double, 2>, 2> w{};
            for (int h = options.first_hour; h <= options.last_hour; ++h) {
                const Snapshot snapshot = make_snapshot(current, profiles, h);
                const HourOutcome o = optimize_snapshot(snapshot, cfg, derive_seed(cfg.seed, {0xCA, r, s, 100u + h}));
                const CostBreakdown* modes[2] = {&o.fixed_eval.cost, &o.optimized_eval.cost};
                for (int m = 0; m < 2; ++m) {
                    const CostBreakdown& c = *modes[m];
                    const double vuf = c.flow_converged ? c.max_vuf : std::numeric_limits<double>::infinity();
                    const double v = c.flow_converged ? c.max_v : std::numeric_limits<double>::infinity();
                    w[m][0] = std::max(w[m][0], vuf);
                    w[m][1] = std::max(w[m][1], v);
                }
            }
            worst[r][s] = w;
        }
    });

    CapacityReport report;
    const char* names[2] = {"fixed", "rephased"};
    for (std::size_t s = 0; s < steps; ++s)
        for (int m = 0; m < 2; ++m) {
            CapacityRow row;
            row.capacity_kw = capacity[s];
            row.mode = names[m];
            row.runs = options.mc_runs;
            for (std::size_t r = 0; r < runs; ++r) {
                row.max_vuf = std::max(row.max_vuf, worst[r][s][m][0]);
                row.max_v = std::max(row.max_v, worst[r][s][m][1]);
                row.mean_max_vuf += worst[r][s][m][0] / static_cast<double>(runs);
                row.mean_max_v += worst[r][s][m][1] / static_cast<double>(runs);
            }
            report.rows.push_back(row);
        }

    const double base_kw = net->total_pv_kw();
    for (int m = 0; m < 2; ++m) {
        UsableCapacity u;
        u.mode = names[m];
        // largest step such that it and every smaller step respect both limits
        for (std::size_t s = 0; s < steps; ++s) {
            const CapacityRow& row = report.rows[2 * s + m];
            if (row.max_vuf > cfg.limits.vuf_max || row.max_v > cfg.limits.v_max) break;
            u.capacity_kw = row.capacity_kw;
        }
        u.increase_percent = base_kw > 0.0 && u.capacity_kw > 0.0 ? 100.0 * (u.capacity_kw - base_kw) / base_kw : 0.0;
        report.usable.push_back(u);
    }

    ensure_dir(out_dir);
    {
        auto f = open_csv(out_dir / "capacity.csv");
        csv::row(f, {"capacity_kw", "mode", "max_vuf", "max_v", "mean_max_vuf", "mean_max_v", "runs"});
        for (const auto& r : report.rows)
            csv::row(f, {csv::num(r.capacity_kw, 4), r.mode, csv::num(r.max_vuf, 8), csv::num(r.max_v, 8),
                         csv::num(r.mean_max_vuf, 8), csv::num(r.mean_max_v, 8), std::to_string(r.runs)});
    }
    {
        auto f = open_csv(out_dir / "usable.csv");
        csv::row(f, {"mode", "usable_capacity_kw", "base_capacity_kw", "increase_percent"});
        for (const auto& u : report.usable)
            csv::row(f, {u.mode, csv::num(u.capacity_kw, 4), csv::num(base_kw, 4), csv::num(u.increase_percent, 4)});
    }
    return report;
}

BenchmarkReport benchmark_experiment(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                                     int hour, const std::vector<Algorithm>& algorithms,
                                     const std::vector<std::uint64_t>& seeds, const ExperimentConfig& cfg,
                                     bool ablation, const fs::path& out_dir) {
    if (algorithms.empty()) throw std::invalid_argument("benchmark: no algorithms listed");
    if (seeds.empty()) throw std::invalid_argument("benchmark: no seeds listed");
    const Snapshot snapshot = make_snapshot(net, profiles, hour);
    const Evaluator evaluator(snapshot, cfg.limits, cfg.solver);

    std::vector<Algorithm> order;
    if (std::find(algorithms.begin(), algorithms.end(), Algorithm::dbfoa) != algorithms.end())
        order.push_back(Algorithm::dbfoa);
    for (Algorithm a : algorithms)
        if (a != Algorithm::dbfoa && std::find(order.begin(), order.end(), a) == order.end()) order.push_back(a);

    BenchmarkReport report;
    std::vector<std::vector<BenchmarkRun>> per_seed(seeds.size());
    std::vector<ConvergenceTrace> traces(seeds.size() * order.size());
    std::vector<AblationRow> ablation_rows(seeds.size());

    parallel_for(seeds.size(), cfg.threads, [&](std::size_t si) {
        const std::uint64_t seed = seeds[si];
        const auto initial = initial_population(snapshot, cfg, seed);
        std::size_t budget = cfg.effective_budget();
        for (std::size_t ai = 0; ai < order.size(); ++ai) {
            const Algorithm a = order[ai];
            OptimizationResult r = run_algorithm(a, evaluator, cfg, initial, budget, seed);
            if (a == Algorithm::dbfoa) budget = std::max<std::size_t>(r.evaluations, 1);
            per_seed[si].push_back({a, seed, r.best_cost.total, r.trace.epochs_to_best(), r.evaluations});
            traces[si * order.size() + ai] = std::move(r.trace);
        }

        if (!ablation) return;
        AblationRow row;
        row.seed = seed;
        const std::uint64_t init_seed = derive_seed(seed, {kInitStream});
        auto best_of = [&](const std::vector<PVConfigVector>& pop) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : pop) best = std::min(best, evaluator.cost(v).total);
            return best;
        };
        row.random_init_best = best_of(random_population(net->pv_count(), cfg.dbfoa.population, init_seed));
        row.balanced_init_best =
            best_of(power_balance_population(snapshot, cfg.dbfoa.population, init_seed, cfg.initializer));
        row.init_cost_ratio = row.random_init_best > 0.0 ? row.balanced_init_best / row.random_init_best : 0.0;
        ExperimentConfig classical = cfg;
        classical.dbfoa.mode = ChemotaxisMode::classical;
        ExperimentConfig regional = cfg;
        regional.dbfoa.mode = ChemotaxisMode::region;
        row.region_final =
            run_algorithm(Algorithm::dbfoa, evaluator, regional, initial, cfg.effective_budget(), seed).best_cost.total;
        row.classical_final =
            run_algorithm(Algorithm::dbfoa, evaluator, classical, initial, cfg.effective_budget(), seed).best_cost.total;
        ablation_rows[si] = row;
    });

    for (auto& runs : per_seed) report.runs.insert(report.runs.end(), runs.begin(), runs.end());
    if (ablation) report.ablation = ablation_rows;

    ensure_dir(out_dir);
    ensure_dir(out_dir / "traces");
    for (std::size_t si = 0; si < seeds.size(); ++si)
        for (std::size_t ai = 0; ai < order.size(); ++ai) {
            auto f = open_csv(out_dir / "traces" /
                              (to_string(order[ai]) + "_seed" + std::to_string(seeds[si]) + ".csv"));
            write_trace_csv(f, traces[si * order.size() + ai], cfg.timing);
        }
    {
        auto f = open_csv(out_dir / "summary.csv");
        csv::row(f, {"algorithm", "seed", "final_cost", "epochs_to_best", "evaluations"});
        for (Algorithm a : order) {
            std::vector<double> finals, epochs, evals;
            for (const auto& r : report.runs) {
                if (r.algorithm != a) continue;
                csv::row(f, {to_string(a), std::to_string(r.seed), csv::num(r.final_cost, 8),
                             std::to_string(r.epochs_to_best), std::to_string(r.evaluations)});
                finals.push_back(r.final_cost);
                epochs.push_back(r.epochs_to_best);
                evals.push_back(static_cast<double>(r.evaluations));
            }
            csv::row(f, {to_string(a), "median", csv::num(median(finals), 8), csv::num(median(epochs), 1),
                         csv::num(median(evals), 1)});
            csv::row(f, {to_string(a), "best", csv::num(*std::min_element(finals.begin(), finals.end()), 8),
                         csv::num(*std::min_element(epochs.begin(), epochs.end()), 1),
                         csv::num(*std::min_element(evals.begin(), evals.end()), 1)});
        }
    }
    if (ablation) {
        auto f = open_csv(out_dir / "ablation.csv");
        csv::row(f, {"seed", "random_init_best", "balanced_init_best", "init_cost_ratio", "region_chemotaxis_final",
                     "classical_chemotaxis_final"});
        for (const auto& r : report.ablation)
            csv::row(f, {std::to_string(r.seed), csv::num(r.random_init_best, 8), csv::num(r.balanced_init_best, 8),
                         csv::num(r.init_cost_ratio, 6), csv::num(r.region_final, 8),
                         csv::num(r.classical_final, 8)});
    }
    return report;
}

std::vector<ValidationRow> validate_dataset(const std::shared_ptr<const Network>& net, const HourlyProfiles& profiles,
                                            const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::vector<ValidationRow> rows;
    const PVConfigVector fixed = net->default_assignment();
    for (int h = 0; h < 24; ++h) {
        const Snapshot snapshot = make_snapshot(net, profiles, h);
        const LoadFlowSolution sol = solve_unchecked(snapshot, fixed, cfg.solver);
        rows.push_back({h, sol.status, sol.iterations, cost_of(sol, cfg.limits)});
    }
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        auto f = open_csv(out_dir / "validate.csv");
        std::vector<std::string> header{"hour", "status", "iterations"};
        append(header, kCostHeader);
        csv::row(f, header);
        for (const auto& r : rows) {
            const char* status = r.status == SolveStatus::converged       ? "converged"
                                 : r.status == SolveStatus::not_converged ? "not_converged"
                                                                          : "collapsed";
            std::vector<std::string> fields{std::to_string(r.hour), status, std::to_string(r.iterations)};
            append(fields, cost_fields(r.cost));
            csv::row(f, fields);
        }
    }
    return rows;
}

}  // namespace rephase
