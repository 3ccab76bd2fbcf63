#include "support.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace rephase::test {

Matrix4 abc70() {
    Matrix4 z{};
    const double re[4][4] = {{0.4918, 0.0486, 0.0487, 0.0486},
                             {0.0486, 0.4918, 0.0487, 0.0486},
                             {0.0487, 0.0487, 0.4918, 0.0487},
                             {0.0486, 0.0486, 0.0487, 0.6790}};
    const double im[4][4] = {{0.7888, 0.6292, 0.6701, 0.7000},
                             {0.6292, 0.7888, 0.6405, 0.6490},
                             {0.6701, 0.6405, 0.7888, 0.7080},
                             {0.7000, 0.6490, 0.7080, 0.7910}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) z[i][j] = Complex(re[i][j], im[i][j]);
    return z;
}

std::filesystem::path data_dir() { return REPHASE_DATA_DIR; }

std::shared_ptr<const Network> bundled_network() {
    static const auto net = std::make_shared<const Network>(load_network(data_dir() / "lotus_grove.net"));
    return net;
}

HourlyProfiles bundled_profiles() { return load_profiles(data_dir() / "lotus_grove_profiles.csv"); }

Network random_radial(Rng& rng, int max_buses, int max_loads, int max_pvs) {
    const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_buses - 1)));
    std::vector<LineSegment> segs;
    for (int k = 1; k < n; ++k) {
        LineSegment s;
        s.from_bus = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        s.to_bus = k;
        s.length_km = 0.02 + 0.1 * rng.uniform01();
        s.z_per_km = abc70();
        segs.push_back(s);
    }
    std::vector<LoadPoint> loads;
    const int n_loads = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_loads)));
    for (int i = 0; i < n_loads; ++i) {
        LoadPoint l;
        l.bus = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
        for (auto& p : l.p_max_kw) p = rng.uniform01() < 0.3 ? 0.0 : 6.0 * rng.uniform01();
        if (l.p_max_kw[0] + l.p_max_kw[1] + l.p_max_kw[2] <= 0.0) l.p_max_kw[0] = 2.0;
        l.power_factor = 0.85 + 0.15 * rng.uniform01();
        loads.push_back(l);
    }
    std::vector<PVUnit> pvs;
    const int n_pv = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_pvs + 1)));
    for (int i = 0; i < n_pv; ++i)
        pvs.push_back({i + 1, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1))), rng.phase(),
                       1.0 + 7.0 * rng.uniform01()});
    return Network::create(n, std::move(segs), std::move(loads), std::move(pvs));
}

Network chain(int buses, double span_km, std::vector<LoadPoint> loads, std::vector<PVUnit> pvs) {
    std::vector<LineSegment> segs;
    for (int k = 1; k < buses; ++k) segs.push_back({k - 1, k, span_km, abc70()});
    return Network::create(buses, std::move(segs), std::move(loads), std::move(pvs));
}

Network six_pv_network() {
    // 0-1-2-3-4 trunk with a lateral 2-5-6-7
    std::vector<LineSegment> segs;
    const int edges[7][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 5}, {5, 6}, {6, 7}};
    for (const auto& e : edges) segs.push_back({e[0], e[1], 0.06, abc70()});
    std::vector<LoadPoint> loads{{1, {3.0, 1.0, 2.0}, 0.95}, {3, {2.5, 2.5, 0.5}, 0.92},
                                 {4, {1.0, 3.5, 1.5}, 0.97}, {6, {0.5, 1.0, 4.0}, 0.9},
                                 {7, {2.0, 0.0, 1.0}, 0.98}};
    std::vector<PVUnit> pvs{{1, 1, Phase::a, 6.0}, {2, 3, Phase::a, 4.5}, {3, 4, Phase::b, 7.0},
                            {4, 5, Phase::a, 5.0}, {5, 6, Phase::c, 3.5}, {6, 7, Phase::a, 8.0}};
    return Network::create(8, std::move(segs), std::move(loads), std::move(pvs));
}

PVConfigVector decode(std::size_t code, std::size_t n) {
    PVConfigVector v(n, Phase::a);
    for (std::size_t m = n; m-- > 0;) {
        v[m] = phase_at(code % 3);
        code /= 3;
    }
    return v;
}

BruteForce brute_force(const Evaluator& evaluator) {
    const std::size_t n = evaluator.network().pv_count();
    std::size_t combos = 1;
    for (std::size_t m = 0; m < n; ++m) combos *= 3;
    BruteForce bf{{}, std::numeric_limits<double>::infinity(), {}};
    for (std::size_t code = 0; code < combos; ++code) {
        const PVConfigVector v = decode(code, n);
        const double c = evaluator.cost(v).total;
        bf.all_costs.push_back(c);
        if (c < bf.best_cost) {
            bf.best_cost = c;
            bf.best = v;
        }
    }
    return bf;
}

int hop_distance(const Network& net, int u, int v) {
    int hops = 0;
    while (net.depth(u) > net.depth(v)) u = net.parent(u), ++hops;
    while (net.depth(v) > net.depth(u)) v = net.parent(v), ++hops;
    while (u != v) u = net.parent(u), v = net.parent(v), hops += 2;
    return hops;
}

Snapshot snapshot_of(const Network& net, double load_factor, double pv_factor) {
    return make_snapshot(std::make_shared<const Network>(net), load_factor, pv_factor);
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rephase_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Network relabel(const Network& net) {
    std::vector<LineSegment> segs = net.segments();
    for (auto& s : segs) {
        Matrix4 z{};
        auto map = [](std::size_t i) { return i == kNeutral ? kNeutral : (i + 1) % 3; };
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) z[map(i)][map(j)] = s.z_per_km[i][j];
        s.z_per_km = z;
    }
    std::vector<LoadPoint> loads = net.loads();
    for (auto& l : loads) l.p_max_kw = {l.p_max_kw[2], l.p_max_kw[0], l.p_max_kw[1]};
    std::vector<PVUnit> pvs = net.pv_units();
    for (auto& pv : pvs) pv.default_phase = rotate(pv.default_phase);
    return Network::create(net.bus_count(), segs, loads, pvs, net.base());
}

PVConfigVector rotated(PVConfigVector v) {
    for (auto& p : v.phases) p = rotate(p);
    return v;
}

}  // namespace rephase::test
