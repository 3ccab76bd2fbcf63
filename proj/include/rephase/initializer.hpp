#pragma once

#include <cstdint>
#include <vector>

#include "rephase/network.hpp"
#include "rephase/phase.hpp"

namespace rephase {

/// A group of PV units balanced together when seeding the population.
struct Region {
    /// Buses whose loads count toward this region's phase balance. Across all
    /// regions these partition the buses of the feeder; they form a run of the
    /// depth-first bus order.
    std::vector<int> buses;
    /// 0-based PV indices, ascending. Between 1 and w_max entries.
    std::vector<int> pvs;
};

/// Depth-first walk of the feeder (children in ascending id), closing a region
/// whenever the next PV-hosting bus would push it past w_max PV units. A bus
/// hosting more than w_max PVs is split into consecutive chunks.
std::vector<Region> partition_regions(const Network& net, int w_max = 6);

struct RegionCandidate {
    std::vector<Phase> phases;  // one entry per region PV
    double mismatch = 0.0;      // population stddev of (P_a, P_b, P_c), kW
};

/// Population standard deviation of three per-phase powers.
double phase_power_stddev(double pa, double pb, double pc);

/// Enumerates all 3^w phase choices of the region's PVs and returns the
/// `k_r` with the smallest active-power mismatch, ties in lexicographic order.
std::vector<RegionCandidate> region_candidates(const Region& region, const Snapshot& snapshot, int k_r = 4);

/// Assembles `size` full assignments by picking one candidate per region uniformly at random.
std::vector<PVConfigVector> build_population(const std::vector<Region>& regions,
                                             const std::vector<std::vector<RegionCandidate>>& candidates,
                                             std::size_t pv_count, int size, std::uint64_t seed);

struct InitializerParams {
    int w_max = 6;
    int k_r = 4;
    int threads = 1;
};

/// Partition, per-region enumeration and random combination in one call.
std::vector<PVConfigVector> power_balance_population(const Snapshot& snapshot, int size, std::uint64_t seed,
                                                     const InitializerParams& params = {});

}  // namespace rephase
