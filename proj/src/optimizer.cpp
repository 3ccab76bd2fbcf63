#include "rephase/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "rephase/csv.hpp"
#include "rephase/rng.hpp"

namespace rephase {

bool ConvergenceTrace::non_increasing() const {
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].best_cost > entries[i - 1].best_cost) return false;
    return true;
}

int ConvergenceTrace::epochs_to_best() const {
    if (entries.empty()) return 0;
    const double final_best = entries.back().best_cost;
    for (const auto& e : entries)
        if (e.best_cost <= final_best) return e.epoch;
    return entries.back().epoch;
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, bool with_timing) {
    csv::row(out, {"epoch", "best_cost", "mean_cost", "wall_ms"});
    for (const auto& e : trace.entries)
        csv::row(out, {std::to_string(e.epoch), csv::num(e.best_cost, 8), csv::num(e.mean_cost, 8),
                       csv::num(with_timing ? e.wall_ms : 0.0, 3)});
}

PVConfigVector random_assignment(std::size_t n, Rng& rng) {
    PVConfigVector v;
    v.phases.resize(n);
    for (auto& p : v.phases) p = rng.phase();
    return v;
}

std::vector<PVConfigVector> random_population(std::size_t pv_count, int size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PVConfigVector> pop;
    pop.reserve(size);
    for (int i = 0; i < size; ++i) pop.push_back(random_assignment(pv_count, rng));
    return pop;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < count; i = next++) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace rephase
