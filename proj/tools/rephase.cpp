// rephase: PV re-phasing experiments on an unbalanced LV feeder.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 solver failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "rephase/csv.hpp"
#include "rephase/experiments.hpp"
#include "rephase/loadflow.hpp"
#include "rephase/network.hpp"

#ifndef REPHASE_DATA_DIR
#define REPHASE_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace rephase;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kSolver = 3 };

struct Common {
    std::string network = std::string(REPHASE_DATA_DIR) + "/lotus_grove.net";
    std::string profiles = std::string(REPHASE_DATA_DIR) + "/lotus_grove_profiles.csv";
    std::string out = "out";
    std::string algo = "dbfoa";
    bool random_init = false;
    ExperimentConfig cfg;
};

void add_common(CLI::App* sub, Common& c, bool with_algo) {
    auto& cfg = c.cfg;
    sub->add_option("--network", c.network, "Network file")->capture_default_str();
    sub->add_option("--profiles", c.profiles, "Hourly profiles CSV")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Master random seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--k1", cfg.limits.k1, "VUF penalty weight")->capture_default_str();
    sub->add_option("--k2", cfg.limits.k2, "Voltage penalty weight")->capture_default_str();
    sub->add_option("--vuf-max", cfg.limits.vuf_max, "VUF limit, percent")->capture_default_str();
    sub->add_option("--vmin", cfg.limits.v_min, "Lower voltage limit, pu")->capture_default_str();
    sub->add_option("--vmax", cfg.limits.v_max, "Upper voltage limit, pu")->capture_default_str();
    sub->add_option("--s", cfg.dbfoa.population, "Population size")->capture_default_str();
    sub->add_option("--nc", cfg.dbfoa.chemotaxis_steps, "Chemotaxis steps")->capture_default_str();
    sub->add_option("--nr", cfg.dbfoa.swim_length, "Re-phasing tries per chemotaxis step")->capture_default_str();
    sub->add_option("--nre", cfg.dbfoa.reproduction_steps, "Reproduction steps")->capture_default_str();
    sub->add_option("--ned", cfg.dbfoa.elimination_steps, "Elimination-dispersal steps")->capture_default_str();
    sub->add_option("--ped", cfg.dbfoa.dispersal_probability, "Dispersal probability")->capture_default_str();
    sub->add_option("--kn", cfg.dbfoa.region_radius, "Unbalance region radius, bus hops")->capture_default_str();
    sub->add_option("--budget", cfg.budget, "Max load-flow solves per optimization (0 = DBFOA bound)")
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
    sub->add_option("--tolerance", cfg.solver.tolerance, "Load-flow tolerance, pu")->capture_default_str();
    sub->add_option("--max-iterations", cfg.solver.max_iterations, "Load-flow iteration limit")
        ->capture_default_str();
    sub->add_flag("--random-init", c.random_init, "Uniform random initial population");
    sub->add_flag("--timing", cfg.timing, "Record wall time in traces (breaks byte-identical reruns)");
    if (with_algo)
        sub->add_option("--algo", c.algo, "dbfoa, dga, sfla or hs")
            ->check(CLI::IsMember({"dbfoa", "dga", "sfla", "hs"}))
            ->capture_default_str();
}

Algorithm algorithm_of(const std::string& name) {
    const auto a = parse_algorithm(name);
    if (!a) throw CLI::ValidationError("--algo", "unknown algorithm '" + name + "'");
    return *a;
}

void finalize(Common& c) {
    c.cfg.power_balance_init = !c.random_init;
    c.cfg.algorithm = algorithm_of(c.algo);
    c.cfg.limits.validate();
    c.cfg.solver.validate();
    c.cfg.dbfoa.validate();
    if (c.cfg.threads < 1) throw std::invalid_argument("--threads must be >= 1");
}

struct Inputs {
    std::shared_ptr<const Network> net;
    HourlyProfiles profiles;
};

Inputs load_inputs(const Common& c) {
    return {std::make_shared<const Network>(load_network(c.network)), load_profiles(c.profiles)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase assignment of single-phase rooftop PV for voltage unbalance reduction"};
    app.require_subcommand(1);

    Common run_c, sweep_c, cap_c, bench_c, val_c;
    int run_hour = 12;
    auto* run = app.add_subcommand("run", "Optimize one hour");
    add_common(run, run_c, true);
    run->add_option("--hour", run_hour, "Hour of day 0..23")->check(CLI::Range(0, 23))->capture_default_str();

    std::vector<int> sweep_hours;
    auto* sweep = app.add_subcommand("sweep", "Optimize every requested hour of the day");
    add_common(sweep, sweep_c, true);
    sweep->add_option("--hours", sweep_hours, "Hours to cover (default 0..23)")
        ->delimiter(',')
        ->check(CLI::Range(0, 23));

    CapacityOptions cap_opts;
    auto* cap = app.add_subcommand("capacity-study", "Monte-Carlo PV hosting capacity with and without re-phasing");
    add_common(cap, cap_c, true);
    cap->add_option("--step-kw", cap_opts.step_kw, "PV capacity added per step, kW")->capture_default_str();
    cap->add_option("--steps", cap_opts.steps, "Number of added PV units")->capture_default_str();
    cap->add_option("--mc-runs", cap_opts.mc_runs, "Monte-Carlo placements")->capture_default_str();
    cap->add_option("--first-hour", cap_opts.first_hour, "Start of daytime window")->capture_default_str();
    cap->add_option("--last-hour", cap_opts.last_hour, "End of daytime window")->capture_default_str();

    int bench_hour = 12;
    std::vector<std::string> bench_algos{"dbfoa", "dga", "sfla", "hs"};
    std::vector<std::uint64_t> bench_seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    bool no_ablation = false;
    std::string classical_count = "0";
    auto* bench = app.add_subcommand("benchmark", "Equal-budget optimizer comparison and ablations");
    add_common(bench, bench_c, false);
    bench->add_option("--hour", bench_hour, "Hour of day 0..23")->check(CLI::Range(0, 23))->capture_default_str();
    bench->add_option("--algos", bench_algos, "Algorithms to compare")
        ->delimiter(',')
        ->check(CLI::IsMember({"dbfoa", "dga", "sfla", "hs"}));
    bench->add_option("--seeds", bench_seeds, "Seeds, comma separated")->delimiter(',');
    bench->add_flag("--no-ablation", no_ablation, "Skip initializer and chemotaxis ablations");
    bench->add_option("--classical-count", bench_c.cfg.dbfoa.classical_count,
                      "PVs redrawn per classical chemotaxis step (0 = match region)")
        ->capture_default_str();

    auto* val = app.add_subcommand("validate", "Lint the dataset and solve the installed configuration hourly");
    add_common(val, val_c, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (run->parsed()) {
            finalize(run_c);
            const auto in = load_inputs(run_c);
            const auto o = run_experiment(in.net, in.profiles, run_hour, run_c.cfg, run_c.out);
            std::cout << "hour " << run_hour << " " << run_c.algo << ": fixed J = " << csv::num(o.fixed_eval.cost.total, 6)
                      << ", optimized J = " << csv::num(o.optimized_eval.cost.total, 6)
                      << ", mean VUF " << csv::num(o.fixed_eval.cost.mean_vuf, 4) << "% -> "
                      << csv::num(o.optimized_eval.cost.mean_vuf, 4) << "%\n";
        } else if (sweep->parsed()) {
            finalize(sweep_c);
            if (sweep_hours.empty())
                for (int h = 0; h < 24; ++h) sweep_hours.push_back(h);
            const auto in = load_inputs(sweep_c);
            const auto outcomes = sweep_experiment(in.net, in.profiles, sweep_hours, sweep_c.cfg, sweep_c.out);
            for (const auto& o : outcomes)
                std::cout << "hour " << o.hour << ": mean VUF " << csv::num(o.fixed_eval.cost.mean_vuf, 4) << "% -> "
                          << csv::num(o.optimized_eval.cost.mean_vuf, 4) << "%\n";
        } else if (cap->parsed()) {
            finalize(cap_c);
            const auto in = load_inputs(cap_c);
            const auto report = capacity_study(in.net, in.profiles, cap_opts, cap_c.cfg, cap_c.out);
            for (const auto& u : report.usable)
                std::cout << u.mode << ": usable capacity " << csv::num(u.capacity_kw, 1) << " kW ("
                          << csv::num(u.increase_percent, 1) << "% over installed)\n";
        } else if (bench->parsed()) {
            finalize(bench_c);
            std::vector<Algorithm> algos;
            for (const auto& a : bench_algos) algos.push_back(algorithm_of(a));
            const auto in = load_inputs(bench_c);
            const auto report = benchmark_experiment(in.net, in.profiles, bench_hour, algos, bench_seeds, bench_c.cfg,
                                                     !no_ablation, bench_c.out);
            for (Algorithm a : algos) {
                std::vector<double> finals;
                for (const auto& r : report.runs)
                    if (r.algorithm == a) finals.push_back(r.final_cost);
                std::cout << to_string(a) << ": median final cost " << csv::num(median(finals), 6) << "\n";
            }
        } else if (val->parsed()) {
            finalize(val_c);
            const auto in = load_inputs(val_c);
            std::cout << "buses " << in.net->bus_count() << ", segments " << in.net->segments().size() << ", loads "
                      << in.net->loads().size() << ", PV units " << in.net->pv_count() << " ("
                      << csv::num(in.net->total_pv_kw(), 1) << " kW)\n";
            int warnings = 0;
            for (int h = 0; h < 24; ++h)
                if (in.profiles.pv_factor[h] > 0.0 && (h < 5 || h > 20)) {
                    std::cerr << "warning: PV output at night hour " << h << "\n";
                    ++warnings;
                }
            const auto rows = validate_dataset(in.net, in.profiles, val_c.cfg, val_c.out);
            bool failed = false;
            for (const auto& r : rows) {
                if (r.status != SolveStatus::converged) {
                    std::cerr << "hour " << r.hour << ": load flow failed for the installed configuration\n";
                    failed = true;
                }
            }
            std::cout << (failed ? "load flow failures found" : "all 24 hours converge") << ", " << warnings
                      << " warning(s)\n";
            if (failed) return kSolver;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NetworkError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const LoadFlowError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}
