#include "rephase/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "rephase/rng.hpp"

namespace rephase {

Vector4 multiply(const Matrix4& m, const Vector4& v) {
    Vector4 out{};
    for (std::size_t r = 0; r < 4; ++r) {
        Complex acc{};
        for (std::size_t c = 0; c < 4; ++c) acc += m[r][c] * v[c];
        out[r] = acc;
    }
    return out;
}

Matrix4 scaled(const Matrix4& m, double factor) {
    Matrix4 out = m;
    for (auto& row : out)
        for (auto& z : row) z *= factor;
    return out;
}

namespace {

std::string segment_name(std::size_t i, const LineSegment& s) {
    return "segment " + std::to_string(i) + " (" + std::to_string(s.from_bus) + "-" +
           std::to_string(s.to_bus) + ")";
}

void check_segment(std::size_t i, const LineSegment& s, int bus_count) {
    if (s.from_bus < 0 || s.from_bus >= bus_count || s.to_bus < 0 || s.to_bus >= bus_count)
        throw NetworkError(segment_name(i, s) + ": references an unknown bus");
    if (s.from_bus == s.to_bus) throw NetworkError(segment_name(i, s) + ": is a self-loop");
    if (!(s.length_km > 0.0) || !std::isfinite(s.length_km))
        throw NetworkError(segment_name(i, s) + ": length must be > 0 km");
    for (std::size_t r = 0; r < 4; ++r) {
        if (!(s.z_per_km[r][r].real() > 0.0))
            throw NetworkError(segment_name(i, s) + ": diagonal resistance must be > 0");
        for (std::size_t c = r + 1; c < 4; ++c) {
            const Complex d = s.z_per_km[r][c] - s.z_per_km[c][r];
            const double scale = std::max(1.0, std::abs(s.z_per_km[r][c]));
            if (std::abs(d) > 1e-9 * scale)
                throw NetworkError(segment_name(i, s) + ": impedance matrix is not symmetric");
        }
    }
}

int find_root(std::vector<int>& uf, int x) {
    while (uf[x] != x) {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    return x;
}

}  // namespace

Network Network::create(int bus_count, std::vector<LineSegment> segments,
                        std::vector<LoadPoint> loads, std::vector<PVUnit> pv_units,
                        SystemBase base) {
    if (bus_count < 1) throw NetworkError("network has no buses");
    if (!(base.volts_ln > 0.0) || !(base.kva > 0.0))
        throw NetworkError("base: volts_ln and kva must be > 0");

    std::vector<int> uf(bus_count);
    std::iota(uf.begin(), uf.end(), 0);
    std::vector<std::vector<std::pair<int, int>>> adjacency(bus_count);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        check_segment(i, s, bus_count);
        const int ra = find_root(uf, s.from_bus);
        const int rb = find_root(uf, s.to_bus);
        if (ra == rb) throw NetworkError("cycle detected at " + segment_name(i, s) + ": network is not radial");
        uf[ra] = rb;
        adjacency[s.from_bus].emplace_back(s.to_bus, static_cast<int>(i));
        adjacency[s.to_bus].emplace_back(s.from_bus, static_cast<int>(i));
    }
    for (auto& adj : adjacency) std::sort(adj.begin(), adj.end());

    Network net;
    net.bus_count_ = bus_count;
    net.parent_.assign(bus_count, -1);
    net.feeding_segment_.assign(bus_count, -1);
    net.children_.assign(bus_count, {});
    net.depth_.assign(bus_count, -1);
    net.order_.reserve(bus_count);

    std::queue<int> frontier;
    frontier.push(0);
    net.depth_[0] = 0;
    while (!frontier.empty()) {
        const int bus = frontier.front();
        frontier.pop();
        net.order_.push_back(bus);
        for (auto [next, seg] : adjacency[bus]) {
            if (net.depth_[next] >= 0) continue;
            net.depth_[next] = net.depth_[bus] + 1;
            net.parent_[next] = bus;
            net.feeding_segment_[next] = seg;
            net.children_[bus].push_back(next);
            frontier.push(next);
        }
    }
    for (int b = 0; b < bus_count; ++b)
        if (net.depth_[b] < 0)
            throw NetworkError("orphan bus " + std::to_string(b) + ": not connected to root bus 0");

    for (std::size_t i = 0; i < loads.size(); ++i) {
        const auto& l = loads[i];
        const std::string name = "load " + std::to_string(i) + " at bus " + std::to_string(l.bus);
        if (l.bus < 0 || l.bus >= bus_count) throw NetworkError(name + ": unknown bus");
        bool any = false;
        for (double p : l.p_max_kw) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw NetworkError(name + ": phase demand must be >= 0");
            any = any || p > 0.0;
        }
        if (!any) throw NetworkError(name + ": needs a positive demand on at least one phase");
        if (!(l.power_factor > 0.0 && l.power_factor <= 1.0))
            throw NetworkError(name + ": power factor must be in (0, 1]");
    }

    std::sort(pv_units.begin(), pv_units.end(),
              [](const PVUnit& x, const PVUnit& y) { return x.id < y.id; });
    net.pv_at_.assign(bus_count, {});
    for (std::size_t i = 0; i < pv_units.size(); ++i) {
        const auto& pv = pv_units[i];
        const std::string name = "PV" + std::to_string(pv.id);
        if (pv.id != static_cast<int>(i) + 1)
            throw NetworkError(name + ": PV ids must be unique and contiguous from 1 (expected PV" +
                               std::to_string(i + 1) + ")");
        if (pv.bus < 0 || pv.bus >= bus_count) throw NetworkError(name + ": unknown bus " + std::to_string(pv.bus));
        if (!(pv.capacity_kw > 0.0) || !std::isfinite(pv.capacity_kw))
            throw NetworkError(name + ": capacity must be > 0 kW");
        net.pv_at_[pv.bus].push_back(static_cast<int>(i));
    }

    net.segments_ = std::move(segments);
    net.loads_ = std::move(loads);
    net.pv_units_ = std::move(pv_units);
    net.base_ = base;
    return net;
}

PVConfigVector Network::default_assignment() const {
    PVConfigVector v;
    v.phases.reserve(pv_units_.size());
    for (const auto& pv : pv_units_) v.phases.push_back(pv.default_phase);
    return v;
}

double Network::total_pv_kw() const {
    double total = 0.0;
    for (const auto& pv : pv_units_) total += pv.capacity_kw;
    return total;
}

Network Network::with_pv(int bus, Phase phase, double capacity_kw) const {
    auto pvs = pv_units_;
    pvs.push_back(PVUnit{static_cast<int>(pvs.size()) + 1, bus, phase, capacity_kw});
    return Network::create(bus_count_, segments_, loads_, std::move(pvs), base_);
}

Network add_random_pv(const Network& net, double capacity_kw, std::uint64_t rng_seed) {
    if (!(capacity_kw > 0.0)) throw std::invalid_argument("add_random_pv: capacity must be > 0");
    if (net.bus_count() < 2) throw std::invalid_argument("add_random_pv: network has no non-root bus");
    Rng rng(rng_seed);
    const int bus = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(net.bus_count() - 1)));
    const Phase phase = rng.phase();
    return net.with_pv(bus, phase, capacity_kw);
}

}  // namespace rephase
