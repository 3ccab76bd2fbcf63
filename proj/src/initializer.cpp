#include "rephase/initializer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "rephase/optimizer.hpp"
#include "rephase/rng.hpp"

namespace rephase {

namespace {

std::vector<int> depth_first_order(const Network& net) {
    std::vector<int> order;
    order.reserve(net.bus_count());
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int bus = stack.back();
        stack.pop_back();
        order.push_back(bus);
        const auto& kids = net.children(bus);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return order;
}

}  // namespace

std::vector<Region> partition_regions(const Network& net, int w_max) {
    if (w_max < 1) throw std::invalid_argument("partition_regions: w_max must be >= 1");
    const std::size_t cap = static_cast<std::size_t>(w_max);
    std::vector<Region> regions;
    Region current;

    for (int bus : depth_first_order(net)) {
        std::vector<int> pvs = net.pv_at(bus);
        if (!pvs.empty()) {
            if (!current.pvs.empty() && current.pvs.size() + pvs.size() > cap) {
                regions.push_back(std::move(current));
                current = Region{};
            }
            // a bus with more PVs than fit in one region is chunked
            while (pvs.size() > cap) {
                regions.push_back(Region{{}, std::vector<int>(pvs.begin(), pvs.begin() + w_max)});
                pvs.erase(pvs.begin(), pvs.begin() + w_max);
            }
            current.pvs.insert(current.pvs.end(), pvs.begin(), pvs.end());
        }
        current.buses.push_back(bus);
    }

    if (!current.pvs.empty()) {
        regions.push_back(std::move(current));
    } else if (!regions.empty()) {
        auto& last = regions.back();
        last.buses.insert(last.buses.end(), current.buses.begin(), current.buses.end());
    }
    for (auto& r : regions) std::sort(r.pvs.begin(), r.pvs.end());
    return regions;
}

double phase_power_stddev(double pa, double pb, double pc) {
    std::array<double, 3> x{pa, pb, pc};
    std::sort(x.begin(), x.end());  // order-independent rounding
    const double mean = (x[0] + x[1] + x[2]) / 3.0;
    const double var = ((x[0] - mean) * (x[0] - mean) + (x[1] - mean) * (x[1] - mean) +
                        (x[2] - mean) * (x[2] - mean)) / 3.0;
    return std::sqrt(var);
}

std::vector<RegionCandidate> region_candidates(const Region& region, const Snapshot& snapshot, int k_r) {
    if (k_r < 1) throw std::invalid_argument("region_candidates: k_r must be >= 1");
    const std::size_t w = region.pvs.size();
    if (w > 13) throw std::invalid_argument("region_candidates: region too large to enumerate");

    std::array<double, 3> load{};
    for (int bus : region.buses)
        for (std::size_t ph = 0; ph < 3; ++ph) load[ph] += snapshot.demand_kva()[bus][ph].real();

    std::size_t combos = 1;
    for (std::size_t m = 0; m < w; ++m) combos *= 3;

    std::vector<RegionCandidate> all;
    all.reserve(combos);
    for (std::size_t code = 0; code < combos; ++code) {
        RegionCandidate c;
        c.phases.resize(w);
        std::size_t rest = code;
        for (std::size_t m = w; m-- > 0;) {  // first PV is the most significant digit
            c.phases[m] = phase_at(rest % 3);
            rest /= 3;
        }
        std::array<double, 3> p = load;
        for (std::size_t m = 0; m < w; ++m) p[index_of(c.phases[m])] -= snapshot.pv_kw()[region.pvs[m]];
        c.mismatch = phase_power_stddev(p[0], p[1], p[2]);
        all.push_back(std::move(c));
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const RegionCandidate& x, const RegionCandidate& y) { return x.mismatch < y.mismatch; });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(k_r)));
    return all;
}

std::vector<PVConfigVector> build_population(const std::vector<Region>& regions,
                                             const std::vector<std::vector<RegionCandidate>>& candidates,
                                             std::size_t pv_count, int size, std::uint64_t seed) {
    if (regions.size() != candidates.size())
        throw std::invalid_argument("build_population: one candidate list per region required");
    Rng rng(seed);
    std::vector<PVConfigVector> pop;
    pop.reserve(size);
    for (int i = 0; i < size; ++i) {
        PVConfigVector v(pv_count, Phase::a);
        for (std::size_t r = 0; r < regions.size(); ++r) {
            const auto& options = candidates[r];
            if (options.empty()) throw std::invalid_argument("build_population: region without candidates");
            const auto& pick = options[rng.below(options.size())];
            for (std::size_t m = 0; m < regions[r].pvs.size(); ++m) v[regions[r].pvs[m]] = pick.phases[m];
        }
        pop.push_back(std::move(v));
    }
    return pop;
}

std::vector<PVConfigVector> power_balance_population(const Snapshot& snapshot, int size, std::uint64_t seed,
                                                     const InitializerParams& params) {
    const auto regions = partition_regions(snapshot.network(), params.w_max);
    std::vector<std::vector<RegionCandidate>> candidates(regions.size());
    parallel_for(regions.size(), params.threads,
                 [&](std::size_t r) { candidates[r] = region_candidates(regions[r], snapshot, params.k_r); });
    return build_population(regions, candidates, snapshot.network().pv_count(), size, seed);
}

}  // namespace rephase
