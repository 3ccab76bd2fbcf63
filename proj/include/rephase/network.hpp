#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rephase/phase.hpp"

namespace rephase {

using Complex = std::complex<double>;

/// Conductor order used by every 4-wire quantity: a, b, c, neutral.
inline constexpr std::size_t kNeutral = 3;
using Matrix4 = std::array<std::array<Complex, 4>, 4>;
using Vector4 = std::array<Complex, 4>;

Vector4 multiply(const Matrix4& m, const Vector4& v);
Matrix4 scaled(const Matrix4& m, double factor);

/// Raised for malformed files and for networks violating a structural invariant.
class NetworkError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct LineSegment {
    int from_bus = 0;
    int to_bus = 0;
    double length_km = 0.0;
    Matrix4 z_per_km{};  // ohm/km

    Matrix4 impedance() const { return scaled(z_per_km, length_km); }
    friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Constant-power load with per-phase peak demand. Several may share a bus.
struct LoadPoint {
    int bus = 0;
    std::array<double, 3> p_max_kw{};
    double power_factor = 1.0;
    friend bool operator==(const LoadPoint&, const LoadPoint&) = default;
};

struct PVUnit {
    int id = 0;  // 1-based
    int bus = 0;
    Phase default_phase = Phase::a;
    double capacity_kw = 0.0;
    friend bool operator==(const PVUnit&, const PVUnit&) = default;
};

struct SystemBase {
    double volts_ln = 415.0 / 1.7320508075688772;  // phase-to-neutral base
    double kva = 400.0;
    friend bool operator==(const SystemBase&, const SystemBase&) = default;
};

/// Validated radial four-wire feeder rooted at bus 0. Buses are numbered
/// 0..bus_count()-1. Immutable after construction.
class Network {
  public:
    /// Checks every invariant and derives the tree structure.
    /// Throws NetworkError naming the offending element.
    static Network create(int bus_count, std::vector<LineSegment> segments,
                          std::vector<LoadPoint> loads, std::vector<PVUnit> pv_units,
                          SystemBase base = {});

    int bus_count() const { return bus_count_; }
    std::size_t pv_count() const { return pv_units_.size(); }
    const std::vector<LineSegment>& segments() const { return segments_; }
    const std::vector<LoadPoint>& loads() const { return loads_; }
    const std::vector<PVUnit>& pv_units() const { return pv_units_; }
    const SystemBase& base() const { return base_; }

    /// Parent bus, -1 for the root.
    int parent(int bus) const { return parent_[bus]; }
    /// Index into segments() of the segment feeding `bus`, -1 for the root.
    int feeding_segment(int bus) const { return feeding_segment_[bus]; }
    const std::vector<int>& children(int bus) const { return children_[bus]; }
    /// Breadth-first order from the root; parents always precede children.
    const std::vector<int>& order() const { return order_; }
    int depth(int bus) const { return depth_[bus]; }

    /// Indices (0-based, into pv_units()) of PV units at each bus.
    const std::vector<int>& pv_at(int bus) const { return pv_at_[bus]; }

    /// The as-installed phase of every PV unit.
    PVConfigVector default_assignment() const;
    double total_pv_kw() const;

    /// Copy with one more PV unit appended (id = pv_count() + 1).
    Network with_pv(int bus, Phase phase, double capacity_kw) const;

    /// Structural equality over the defining data.
    friend bool operator==(const Network& x, const Network& y) {
        return x.bus_count_ == y.bus_count_ && x.segments_ == y.segments_ &&
               x.loads_ == y.loads_ && x.pv_units_ == y.pv_units_ && x.base_ == y.base_;
    }

  private:
    Network() = default;

    int bus_count_ = 0;
    std::vector<LineSegment> segments_;
    std::vector<LoadPoint> loads_;
    std::vector<PVUnit> pv_units_;
    SystemBase base_;

    std::vector<int> parent_;
    std::vector<int> feeding_segment_;
    std::vector<std::vector<int>> children_;
    std::vector<int> order_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> pv_at_;
};

// Network file (sectioned text):
//
//   [base]      volts_ln, <V>   /   kva, <kVA>
//   [buses]     <id>             one per line, ids 0..N-1
//   [segments]  from, to, length_km, then 16 (re, im) pairs of Z in ohm/km, row-major a,b,c,n
//   [loads]     bus, pa_kw, pb_kw, pc_kw, pf
//   [pv]        id, bus, phase, kw
//
// '#' starts a comment. Blank lines are ignored.
Network parse_network(std::string_view text, std::string_view source_name = "<string>");
Network load_network(const std::filesystem::path& path);
void write_network(std::ostream& out, const Network& net);

/// Hourly scaling factors, index = hour of day (hour h covers h:00 to h+1:00).
struct HourlyProfiles {
    std::array<double, 24> pv_factor{};
    std::array<double, 24> load_factor{};
};

/// 24 rows "hour, pv_factor, load_factor". An optional header row is allowed.
HourlyProfiles parse_profiles(std::string_view text, std::string_view source_name = "<string>");
HourlyProfiles load_profiles(const std::filesystem::path& path);

/// Loads and PV output of one instant. Shares the network it was made from.
class Snapshot {
  public:
    Snapshot(std::shared_ptr<const Network> net, std::vector<std::array<Complex, 3>> demand_kva,
             std::vector<double> pv_kw, int hour = -1);

    const Network& network() const { return *network_; }
    const std::shared_ptr<const Network>& network_ptr() const { return network_; }
    int hour() const { return hour_; }

    /// Aggregated load demand per bus and phase, kW + j kvar.
    const std::vector<std::array<Complex, 3>>& demand_kva() const { return demand_kva_; }
    /// Active injection of every PV unit (unity power factor), kW.
    const std::vector<double>& pv_kw() const { return pv_kw_; }
    double total_pv_kw() const;

  private:
    std::shared_ptr<const Network> network_;
    std::vector<std::array<Complex, 3>> demand_kva_;
    std::vector<double> pv_kw_;
    int hour_;
};

/// Scales every load by `load_factor` and every PV by `pv_factor`.
Snapshot make_snapshot(std::shared_ptr<const Network> net, double load_factor, double pv_factor,
                       int hour = -1);
Snapshot make_snapshot(std::shared_ptr<const Network> net, const HourlyProfiles& profiles, int hour);

/// Reactive demand of a constant power-factor load.
double reactive_kvar(double kw, double power_factor);

/// Copy of `net` with one extra PV of `capacity_kw` at a uniformly random
/// non-root bus and uniformly random phase.
Network add_random_pv(const Network& net, double capacity_kw, std::uint64_t rng_seed);

}  // namespace rephase
