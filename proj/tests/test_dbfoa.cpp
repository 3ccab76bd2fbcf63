#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "rephase/dbfoa.hpp"
#include "rephase/initializer.hpp"
#include "support.hpp"

using namespace rephase;
using Catch::Approx;

namespace {

LoadFlowSolution with_vufs(std::vector<double> vufs) {
    LoadFlowSolution s;
    s.status = SolveStatus::converged;
    s.vuf_percent = std::move(vufs);
    return s;
}

PopulationState population(std::vector<std::string> vectors, std::vector<std::vector<double>> history) {
    PopulationState st;
    for (const auto& v : vectors) st.vectors.push_back(*PVConfigVector::from_string(v));
    st.cost_history = std::move(history);
    return st;
}

}  // namespace

TEST_CASE("params", "[dbfoa]") {
    DbfoaParams p;
    CHECK(p.population == 10);
    CHECK(p.chemotaxis_steps == 5);
    CHECK(p.swim_length == 5);
    CHECK(p.reproduction_steps == 5);
    CHECK(p.elimination_steps == 5);
    CHECK(p.dispersal_probability == 0.2);
    CHECK(p.region_radius == 3);
    CHECK(p.evaluation_bound() == 10u * 5 * 5 * 5 * 6);
    p.dispersal_probability = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = DbfoaParams{};
    p.chemotaxis_steps = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("highest unbalance region", "[dbfoa]") {
    const Network chain = test::chain(5, 0.03, {{1, {1.0, 0.0, 0.0}, 1.0}}, {});
    const auto sol = with_vufs({0.0, 0.1, 0.5, 0.2, 0.1});
    CHECK(highest_unbalance_region(sol, chain, 0) == std::vector<int>{2});
    CHECK(highest_unbalance_region(sol, chain, 1) == std::vector<int>{1, 2, 3});
    CHECK(highest_unbalance_region(sol, chain, 10) == std::vector<int>{0, 1, 2, 3, 4});
    // ties resolve to the lowest bus id
    CHECK(highest_unbalance_region(with_vufs({0.0, 0.3, 0.1, 0.3, 0.0}), chain, 0) == std::vector<int>{1});

    const auto net = test::bundled_network();
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> vufs(net->bus_count());
        for (auto& v : vufs) v = rng.uniform01();
        const int radius = static_cast<int>(rng.below(5));
        const int worst = static_cast<int>(std::max_element(vufs.begin(), vufs.end()) - vufs.begin());
        std::vector<int> expected;
        for (int b = 0; b < net->bus_count(); ++b)
            if (test::hop_distance(*net, worst, b) <= radius) expected.push_back(b);
        CHECK(highest_unbalance_region(with_vufs(vufs), *net, radius) == expected);
    }
}

TEST_CASE("chemotaxis step", "[dbfoa]") {
    SECTION("region without PV units leaves the vector alone") {
        // the far end of the lateral is the worst bus and the only PV sits on the other branch
        std::vector<LineSegment> segs{{0, 1, 0.05, test::abc70()}, {0, 2, 0.05, test::abc70()},
                                      {2, 3, 0.05, test::abc70()}, {3, 4, 0.05, test::abc70()}};
        const Network net = Network::create(5, segs, {{4, {9.0, 0.0, 0.0}, 0.9}}, {{1, 1, Phase::a, 1.0}});
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        DbfoaParams p;
        p.region_radius = 1;
        Rng rng(1);
        const auto out = d_chemotaxis_step(PVConfigVector(1, Phase::a), ev, p, rng);
        CHECK(out.region == std::vector<int>{3, 4});
        CHECK(out.tries == 0);
        CHECK_FALSE(out.accepted);
        CHECK(out.vector == PVConfigVector(1, Phase::a));
        CHECK(ev.evaluations() == 1);
    }
    SECTION("optimal input is never replaced") {
        const Network net = test::six_pv_network();
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        const auto bf = test::brute_force(ev);
        DbfoaParams p;
        p.region_radius = 10;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(seed);
            const auto out = d_chemotaxis_step(bf.best, ev, p, rng);
            CHECK_FALSE(out.accepted);
            CHECK(out.vector == bf.best);
            CHECK(out.cost.total == out.start_cost.total);
            CHECK(out.tries == p.swim_length);
        }
    }
}

TEST_CASE("chemotaxis locality and safety", "[dbfoa]") {
    const auto net = test::bundled_network();
    Evaluator ev(make_snapshot(net, test::bundled_profiles(), 12), {});
    DbfoaParams p;
    Rng rng(2024);
    int accepted = 0;
    for (int step = 0; step < 200; ++step) {
        PVConfigVector v = random_assignment(net->pv_count(), rng);
        const auto out = d_chemotaxis_step(v, ev, p, rng);
        const std::set<int> region(out.region.begin(), out.region.end());
        for (std::size_t m = 0; m < v.size(); ++m)
            if (out.vector[m] != v[m]) CHECK(region.count(net->pv_units()[m].bus) == 1);
        if (out.accepted) {
            ++accepted;
            CHECK(out.cost.total < out.start_cost.total);
        } else {
            CHECK(out.vector == v);
            CHECK(out.cost.total == out.start_cost.total);
        }
    }
    CHECK(accepted > 0);
}

TEST_CASE("reproduction", "[dbfoa]") {
    SECTION("single vector") {
        const auto st = d_reproduction(population({"ab"}, {{3.0, 2.0}}));
        CHECK(st.vectors[0].to_string() == "ab");
    }
    SECTION("worst replaced by best") {
        const auto st = d_reproduction(population({"aa", "bb", "cc"}, {{5.0}, {9.0}, {3.0}}));
        CHECK(st.vectors[0].to_string() == "aa");
        CHECK(st.vectors[1].to_string() == "cc");
        CHECK(st.vectors[2].to_string() == "cc");
    }
    SECTION("cumulative cost sums the history") {
        const auto st = d_reproduction(population({"aa", "bb", "cc"}, {{1.0, 1.0, 3.0}, {4.0, 2.0, 1.0}, {2.0, 2.0, 2.0}}));
        CHECK(st.vectors[1].to_string() == "aa");  // 7 is the worst, 5 the best
        CHECK(st.vectors[2].to_string() == "cc");
    }
    SECTION("all equal") {
        const auto st = d_reproduction(population({"ab", "bc", "ca"}, {{1.0}, {1.0}, {1.0}}));
        CHECK(st.vectors[0].to_string() == "ab");
        CHECK(st.vectors[1].to_string() == "bc");
        CHECK(st.vectors[2].to_string() == "ca");
    }
    SECTION("conservation") {
        Rng rng(8);
        for (int t = 0; t < 100; ++t) {
            const std::size_t s = 2 + rng.below(9);
            PopulationState st;
            for (std::size_t i = 0; i < s; ++i) {
                st.vectors.push_back(random_assignment(5, rng));
                st.cost_history.push_back({rng.uniform01(), rng.uniform01()});
            }
            std::size_t best = 0;
            for (std::size_t i = 1; i < s; ++i)
                if (st.cost_history[i][0] + st.cost_history[i][1] < st.cost_history[best][0] + st.cost_history[best][1])
                    best = i;
            const PVConfigVector champion = st.vectors[best];
            const auto out = d_reproduction(st);
            CHECK(out.vectors.size() == s);
            CHECK(std::count(out.vectors.begin(), out.vectors.end(), champion) >= 2);
        }
    }
}

TEST_CASE("elimination and dispersal", "[dbfoa]") {
    PopulationState st = population({"aaaa", "bbbb", "cccc", "abca"}, {});
    st.best = *PVConfigVector::from_string("abcc");
    st.best_cost.total = 0.25;
    SECTION("zero probability") {
        Rng rng(1);
        const auto out = d_elimination_dispersal(st, 0.0, rng);
        CHECK(out.vectors == st.vectors);
    }
    SECTION("certain replacement") {
        Rng rng(4), replay(4);
        const auto out = d_elimination_dispersal(st, 1.0, rng);
        for (const auto& v : out.vectors) {
            (void)replay.uniform01();
            CHECK(v == random_assignment(4, replay));
        }
        CHECK(out.best.to_string() == "abcc");
        CHECK(out.best_cost.total == 0.25);
    }
    SECTION("expected replacements at 0.2") {
        PopulationState ten;
        for (int i = 0; i < 10; ++i) ten.vectors.push_back(PVConfigVector(40, Phase::a));
        Rng rng(9);
        double replaced = 0.0;
        const int events = 4000;
        for (int e = 0; e < events; ++e) {
            const auto out = d_elimination_dispersal(ten, 0.2, rng);
            for (const auto& v : out.vectors) replaced += v == ten.vectors[0] ? 0.0 : 1.0;
        }
        CHECK(replaced / events == Approx(2.0).margin(0.1));
    }
}

TEST_CASE("optimize", "[dbfoa]") {
    SECTION("single PV finds the best of three") {
        const Network net = test::chain(3, 0.1, {{1, {1.0, 6.0, 2.0}, 0.95}}, {{1, 2, Phase::a, 5.0}});
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        const auto bf = test::brute_force(ev);
        DbfoaParams p;
        p.seed = 3;
        const auto r = dbfoa_optimize(ev, p, random_population(1, p.population, 17));
        CHECK(r.best == bf.best);
        CHECK(r.best_cost.total == bf.best_cost);
    }
    SECTION("deterministic, schedule independent and within budget") {
        const Network net = test::six_pv_network();
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        DbfoaParams p;
        p.seed = 12;
        const auto init = random_population(net.pv_count(), p.population, 5);
        const auto a = dbfoa_optimize(ev, p, init);
        const std::size_t counted = ev.evaluations();
        p.threads = 4;
        const auto b = dbfoa_optimize(ev, p, init);
        CHECK(a.best == b.best);
        CHECK(a.best_cost.total == b.best_cost.total);
        REQUIRE(a.trace.entries.size() == b.trace.entries.size());
        for (std::size_t e = 0; e < a.trace.entries.size(); ++e) {
            CHECK(a.trace.entries[e].best_cost == b.trace.entries[e].best_cost);
            CHECK(a.trace.entries[e].mean_cost == b.trace.entries[e].mean_cost);
        }
        CHECK(a.trace.non_increasing());
        CHECK(a.trace.entries.size() == 1 + 5 * 5 * 5);
        CHECK(a.evaluations == counted);
        CHECK(a.evaluations <= p.evaluation_bound());
    }
    SECTION("evaluation cap") {
        const Network net = test::six_pv_network();
        for (std::size_t cap : {1u, 2u, 7u, 50u, 333u}) {
            Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
            DbfoaParams p;
            p.max_evaluations = cap;
            const auto r = dbfoa_optimize(ev, p, random_population(net.pv_count(), p.population, cap));
            CHECK(r.evaluations <= cap);
            CHECK(ev.evaluations() == r.evaluations);
            CHECK(r.trace.non_increasing());
        }
    }
    SECTION("six PV units reach the exhaustive optimum") {
        const Network net = test::six_pv_network();
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        const auto bf = test::brute_force(ev);
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            DbfoaParams p;
            p.seed = seed;
            const auto r = dbfoa_optimize(ev, p, random_population(net.pv_count(), p.population, seed + 100));
            CHECK(r.best_cost.total >= bf.best_cost);
            if (r.best_cost.total <= 1.01 * bf.best_cost) ++hits;
        }
        CHECK(hits >= 9);
    }
    SECTION("classical mode") {
        const Network net = test::six_pv_network();
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        DbfoaParams p;
        p.mode = ChemotaxisMode::classical;
        p.classical_count = 2;
        const auto r = dbfoa_optimize(ev, p, random_population(net.pv_count(), p.population, 1));
        CHECK(r.trace.non_increasing());
        CHECK(r.evaluations <= p.evaluation_bound());
    }
    SECTION("population size must match") {
        const Network net = test::six_pv_network();
        Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
        CHECK_THROWS_AS(dbfoa_optimize(ev, {}, random_population(net.pv_count(), 3, 1)), std::invalid_argument);
    }
}
