#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rephase/network.hpp"
#include "rephase/objective.hpp"
#include "rephase/rng.hpp"

namespace rephase::test {

/// ABC 70 overhead cable, ohm/km.
Matrix4 abc70();

std::filesystem::path data_dir();
std::shared_ptr<const Network> bundled_network();
HourlyProfiles bundled_profiles();

/// Random radial feeder: parent of bus k drawn from 0..k-1.
Network random_radial(Rng& rng, int max_buses = 10, int max_loads = 3, int max_pvs = 2);

/// Chain 0-1-...-(n-1) with uniform spans.
Network chain(int buses, double span_km, std::vector<LoadPoint> loads, std::vector<PVUnit> pvs);

/// Small feeder with six PV units whose phases matter.
Network six_pv_network();

/// Exhaustive search over {a,b,c}^n.
struct BruteForce {
    PVConfigVector best;
    double best_cost;
    std::vector<double> all_costs;  // indexed by base-3 code, first PV most significant
};
BruteForce brute_force(const Evaluator& evaluator);
PVConfigVector decode(std::size_t code, std::size_t n);

/// Hop distance through the lowest common ancestor.
int hop_distance(const Network& net, int u, int v);

/// Cyclic relabel a -> b -> c -> a of every phase-indexed quantity.
Network relabel(const Network& net);
PVConfigVector rotated(PVConfigVector v);

/// Per-phase snapshot at a fixed load/PV scaling.
Snapshot snapshot_of(const Network& net, double load_factor, double pv_factor);

/// Fresh empty directory under the system temp path.
std::filesystem::path temp_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

}  // namespace rephase::test
