#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rephase/csv.hpp"
#include "rephase/loadflow.hpp"
#include "support.hpp"

using namespace rephase;
using Catch::Approx;

namespace {

const Complex kAlpha = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

double max_phase_deviation_pu(const LoadFlowSolution& x, const LoadFlowSolution& y, double base) {
    double worst = 0.0;
    for (std::size_t b = 0; b < x.voltages.size(); ++b)
        for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(x.voltages[b][c] - y.voltages[b][c]) / base);
    return worst;
}

}  // namespace

TEST_CASE("sequence components", "[loadflow]") {
    const Complex a = std::polar(1.0, 0.0), b = std::polar(1.0, -2 * std::numbers::pi / 3),
                  c = std::polar(1.0, 2 * std::numbers::pi / 3);
    SECTION("balanced positive sequence") {
        const auto s = sequence_components(a, b, c);
        CHECK(std::abs(s.positive - 1.0) < 1e-15);
        CHECK(std::abs(s.negative) < 1e-15);
        CHECK(std::abs(s.zero) < 1e-15);
        CHECK(vuf(s.positive, s.negative) <= 1e-12);
    }
    SECTION("reversed sequence") {
        const auto s = sequence_components(a, c, b);
        CHECK(std::abs(s.positive) < 1e-15);
        CHECK(std::abs(s.negative - 1.0) < 1e-15);
    }
    SECTION("magnitude unbalance") {
        const auto s = sequence_components(1.05 * a, 0.95 * b, 1.00 * c);
        // independent evaluation of the transform definition
        const Complex neg = (1.05 * a + kAlpha * kAlpha * 0.95 * b + kAlpha * 1.00 * c) / 3.0;
        const Complex pos = (1.05 * a + kAlpha * 0.95 * b + kAlpha * kAlpha * 1.00 * c) / 3.0;
        CHECK(std::abs(s.negative - neg) < 1e-15);
        CHECK(std::abs(s.positive - pos) < 1e-15);
        CHECK(std::abs(s.negative) == Approx(0.0866 / 3.0).margin(5e-5));
        CHECK(std::abs(s.positive) == Approx(1.0).margin(5e-5));
        CHECK(vuf(s.positive, s.negative) == Approx(100.0 * std::abs(neg) / std::abs(pos)).margin(1e-12));
        CHECK(vuf(s.positive, s.negative) == Approx(2.887).margin(0.01));
    }
    SECTION("inverse round-trip") {
        Rng rng(3);
        for (int i = 0; i < 1000; ++i) {
            const Complex va(rng.uniform01() - 0.5, rng.uniform01() - 0.5), vb(rng.uniform01(), -rng.uniform01()),
                vc(-rng.uniform01(), rng.uniform01());
            const auto back = phase_components(sequence_components(va, vb, vc));
            CHECK(std::abs(back[0] - va) <= 1e-12);
            CHECK(std::abs(back[1] - vb) <= 1e-12);
            CHECK(std::abs(back[2] - vc) <= 1e-12);
        }
    }
}

TEST_CASE("vuf", "[loadflow]") {
    CHECK(vuf(1.0, 0.0) == 0.0);
    CHECK(vuf(1.0, 0.0866) == Approx(8.66).epsilon(1e-12));
    CHECK(vuf(1.0, 0.01) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(vuf(0.0, 0.1), std::domain_error);
}

TEST_CASE("zero injection gives the source everywhere", "[loadflow]") {
    const Network net = test::chain(4, 0.05, {{2, {1.0, 2.0, 0.5}, 0.9}}, {{1, 3, Phase::b, 4.0}});
    const Snapshot s = test::snapshot_of(net, 0.0, 0.0);
    const auto sol = solve(s, net.default_assignment());
    CHECK(sol.converged());
    CHECK(sol.iterations == 1);
    const Vector4 src = source_voltages(net.base());
    for (int b = 0; b < net.bus_count(); ++b) {
        for (std::size_t c = 0; c < 4; ++c) CHECK(sol.voltages[b][c] == src[c]);
        CHECK(sol.vuf_percent[b] <= 1e-12);
    }
    const auto oracle = nodal_oracle(s, net.default_assignment());
    CHECK(max_phase_deviation_pu(sol, oracle, net.base().volts_ln) <= 1e-12);
}

TEST_CASE("two-bus feeder against the nodal oracle", "[loadflow]") {
    SECTION("balanced three-phase load") {
        const Network net = test::chain(2, 0.2, {{1, {10.0, 10.0, 10.0}, 0.95}}, {});
        const Snapshot s = test::snapshot_of(net, 1.0, 0.0);
        const auto sol = solve(s, {});
        const auto oracle = nodal_oracle(s, {});
        CHECK(max_phase_deviation_pu(sol, oracle, net.base().volts_ln) <= 1e-8);
        CHECK(sol.phase_pu[1][0] < 1.0);
    }
    SECTION("single-phase load") {
        const Network net = test::chain(2, 0.2, {{1, {10.0, 0.0, 0.0}, 0.95}}, {});
        const Snapshot s = test::snapshot_of(net, 1.0, 0.0);
        const auto sol = solve(s, {});
        const auto oracle = nodal_oracle(s, {});
        CHECK(max_phase_deviation_pu(sol, oracle, net.base().volts_ln) <= 1e-8);
        CHECK(sol.vuf_percent[1] > 0.0);
        CHECK(std::abs(sol.vuf_percent[1] - oracle.vuf_percent[1]) <= 1e-6);
        CHECK(sol.vuf_percent[0] <= 1e-12);
    }
}

TEST_CASE("five-bus chain with mixed loads against the nodal oracle", "[loadflow]") {
    const Network net = test::chain(5, 0.08,
                                    {{1, {3.0, 0.0, 1.0}, 0.9}, {2, {2.0, 2.0, 2.0}, 0.97}, {4, {0.0, 5.0, 0.5}, 0.85}},
                                    {{1, 3, Phase::c, 6.0}, {2, 4, Phase::a, 3.0}});
    const Snapshot s = test::snapshot_of(net, 1.0, 1.0);
    for (std::size_t code = 0; code < 9; ++code) {
        const auto v = test::decode(code, 2);
        const auto sol = solve(s, v);
        const auto oracle = nodal_oracle(s, v);
        CHECK(max_phase_deviation_pu(sol, oracle, net.base().volts_ln) <= 1e-8);
        CHECK(sol.mismatch <= SolverSettings{}.tolerance);
    }
}

TEST_CASE("randomized oracle equivalence", "[loadflow]") {
    Rng rng(20240);
    for (int i = 0; i < 100; ++i) {
        const Network net = test::random_radial(rng, 10, 3, 2);
        const Snapshot s = test::snapshot_of(net, 0.5 + 0.5 * rng.uniform01(), rng.uniform01());
        PVConfigVector v;
        for (std::size_t m = 0; m < net.pv_count(); ++m) v.phases.push_back(rng.phase());
        const auto sol = solve(s, v);
        const auto oracle = nodal_oracle(s, v);
        INFO("case " << i);
        CHECK(max_phase_deviation_pu(sol, oracle, net.base().volts_ln) <= 1e-8);
    }
}

TEST_CASE("phase relabel equivariance", "[loadflow]") {
    Rng rng(77);
    const Complex shift = std::polar(1.0, -2.0 * std::numbers::pi / 3.0);
    for (int i = 0; i < 20; ++i) {
        const Network net = test::random_radial(rng, 10, 3, 2);
        const Network rel = test::relabel(net);
        const double lf = 0.5 + 0.5 * rng.uniform01(), pf = rng.uniform01();
        const auto x = solve(test::snapshot_of(net, lf, pf), net.default_assignment());
        const auto y = solve(test::snapshot_of(rel, lf, pf), test::rotated(net.default_assignment()));
        for (int b = 0; b < net.bus_count(); ++b) {
            CHECK(std::abs(x.vuf_percent[b] - y.vuf_percent[b]) <= 1e-10);
            for (std::size_t p = 0; p < 3; ++p) {
                const std::size_t q = (p + 1) % 3;
                CHECK(std::abs(y.phase_pu[b][q] - x.phase_pu[b][p]) <= 1e-10);
                CHECK(std::abs(y.voltages[b][q] - x.voltages[b][p] * shift) / net.base().volts_ln <= 1e-10);
            }
        }
    }
}

TEST_CASE("solver errors", "[loadflow]") {
    // 1 MW on a 1 km LV span cannot be supplied
    const Network net = test::chain(2, 1.0, {{1, {1000.0, 1000.0, 1000.0}, 0.9}}, {});
    const Snapshot s = test::snapshot_of(net, 1.0, 0.0);
    const auto sol = solve_unchecked(s, {});
    CHECK_FALSE(sol.converged());
    CHECK_THROWS_AS(solve(s, {}), LoadFlowError);

    const Network ok = test::chain(3, 0.1, {{2, {8.0, 0.0, 0.0}, 0.9}}, {});
    const auto limited = solve_unchecked(test::snapshot_of(ok, 1.0, 0.0), {}, {1e-12, 1});
    CHECK(limited.status == SolveStatus::not_converged);
    try {
        (void)solve(test::snapshot_of(ok, 1.0, 0.0), {}, {1e-12, 1});
        FAIL("expected LoadFlowError");
    } catch (const LoadFlowError& e) {
        CHECK(e.status() == SolveStatus::not_converged);
        CHECK(e.mismatch() > 1e-12);
    }

    CHECK_THROWS_AS(solve(test::snapshot_of(ok, 1.0, 0.0), PVConfigVector(1, Phase::a)), std::invalid_argument);
    CHECK_THROWS_AS((SolverSettings{0.0, 10}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SolverSettings{1e-6, 0}.validate()), std::invalid_argument);

    std::vector<LineSegment> segs;
    for (int k = 1; k < 12; ++k) segs.push_back({k - 1, k, 0.03, test::abc70()});
    const Network eleven = Network::create(12, segs, {{1, {1.0, 1.0, 1.0}, 1.0}}, {});
    CHECK_THROWS_AS(nodal_oracle(test::snapshot_of(eleven, 1.0, 0.0), {}), std::invalid_argument);
}

TEST_CASE("bundled noon flow is well behaved", "[loadflow]") {
    const auto net = test::bundled_network();
    const Snapshot s = make_snapshot(net, test::bundled_profiles(), 12);
    const auto sol = solve(s, net->default_assignment());
    CHECK(sol.converged());
    CHECK(sol.mismatch <= 1e-6);
    CHECK(sol.iterations < 20);
    for (int b = 0; b < net->bus_count(); ++b) {
        CHECK(sol.vuf_percent[b] >= 0.0);
        for (double v : sol.phase_pu[b]) {
            CHECK(v > 0.9);
            CHECK(v < 1.1);
        }
    }
    for (std::size_t c = 0; c < 4; ++c) CHECK(sol.voltages[0][c] == source_voltages(net->base())[c]);
}

TEST_CASE("solution CSV", "[loadflow]") {
    const Network net = test::chain(3, 0.05, {{2, {3.0, 0.0, 0.0}, 0.95}}, {});
    const auto sol = solve(test::snapshot_of(net, 1.0, 0.0), {});
    std::ostringstream out;
    write_solution_csv(out, sol, net.base());
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "bus,Va,Vb,Vc,Vn,VUF_percent");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto f = csv::split(line);
        REQUIRE(f.size() == 6);
        CHECK(csv::to_int(f[0]) == rows);
        CHECK(csv::to_double(f[5]) == Approx(sol.vuf_percent[rows]).margin(1e-6));
        ++rows;
    }
    CHECK(rows == 3);
}
