#include <catch2/catch_amalgamated.hpp>

#include "rephase/baselines.hpp"
#include "support.hpp"

using namespace rephase;

namespace {

struct Desk {
    Network net = test::six_pv_network();
    Evaluator ev{test::snapshot_of(net, 1.0, 1.0), {}};
    test::BruteForce bf = test::brute_force(ev);
};

Desk& desk() {
    static Desk d;
    return d;
}

bool is_local_minimum(const Evaluator& ev, const PVConfigVector& v) {
    const double c = ev.cost(v).total;
    for (std::size_t m = 0; m < v.size(); ++m)
        for (Phase p : kPhases) {
            if (p == v[m]) continue;
            PVConfigVector n = v;
            n[m] = p;
            if (ev.cost(n).total < c) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("algorithm names", "[baselines]") {
    for (Algorithm a : {Algorithm::dbfoa, Algorithm::dga, Algorithm::sfla, Algorithm::hs})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_FALSE(parse_algorithm("pso").has_value());
    BaselineParams p;
    p.crossover_rate = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = BaselineParams{};
    p.max_epochs = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("single PV is solved by every baseline", "[baselines]") {
    const Network net = test::chain(3, 0.1, {{1, {1.0, 6.0, 2.0}, 0.95}}, {{1, 2, Phase::a, 5.0}});
    Evaluator ev(test::snapshot_of(net, 1.0, 1.0), {});
    const auto bf = test::brute_force(ev);
    BaselineParams p;
    p.seed = 9;
    CHECK(dga_optimize(ev, p, random_population(1, 10, 2)).best == bf.best);
    CHECK(sfla_optimize(ev, p, random_population(1, 10, 2)).best == bf.best);
    for (Phase start : kPhases) {
        const auto r = heuristic_search_optimize(ev, p, PVConfigVector(1, start));
        CHECK(r.best == bf.best);
        CHECK(r.trace.entries.size() <= 3);  // start, at most one move, then a final scan
    }
}

TEST_CASE("genetic algorithm", "[baselines]") {
    auto& d = desk();
    BaselineParams p;
    p.seed = 4;
    const auto init = random_population(d.net.pv_count(), 10, 8);
    const auto a = dga_optimize(d.ev, p, init);
    const auto b = dga_optimize(d.ev, p, init);
    CHECK(a.best == b.best);
    CHECK(a.best_cost.total == b.best_cost.total);
    CHECK(a.trace.entries.size() == b.trace.entries.size());
    CHECK(a.trace.non_increasing());
    CHECK(a.best_cost.total >= d.bf.best_cost);
    CHECK(a.evaluations == 10 + 250 * 9);
    CHECK(a.trace.entries.size() == 251);

    p.max_evaluations = 100;
    const auto capped = dga_optimize(d.ev, p, init);
    CHECK(capped.evaluations <= 100);
    CHECK(capped.evaluations >= 100 - 9);
}

TEST_CASE("shuffled frog leaping", "[baselines]") {
    auto& d = desk();
    BaselineParams p;
    p.seed = 4;
    const auto init = random_population(d.net.pv_count(), 10, 8);
    const auto a = sfla_optimize(d.ev, p, init);
    const auto b = sfla_optimize(d.ev, p, init);
    CHECK(a.best == b.best);
    CHECK(a.trace.entries.size() == b.trace.entries.size());
    CHECK(a.trace.non_increasing());
    CHECK(a.best_cost.total >= d.bf.best_cost);

    for (std::size_t cap : {5u, 10u, 11u, 500u}) {
        p.max_evaluations = cap;
        const std::size_t before = d.ev.evaluations();
        const auto r = sfla_optimize(d.ev, p, init);
        CHECK(r.evaluations <= cap);
        CHECK(d.ev.evaluations() - before == r.evaluations);
    }
}

TEST_CASE("heuristic search", "[baselines]") {
    auto& d = desk();
    BaselineParams p;
    SECTION("global optimum is kept") {
        const auto r = heuristic_search_optimize(d.ev, p, d.bf.best);
        CHECK(r.best == d.bf.best);
        CHECK(r.evaluations == 1 + 2 * d.net.pv_count());
    }
    SECTION("ends in a single-change local minimum") {
        Rng rng(6);
        for (int t = 0; t < 10; ++t) {
            const auto r = heuristic_search_optimize(d.ev, p, random_assignment(d.net.pv_count(), rng));
            CHECK(is_local_minimum(d.ev, r.best));
            CHECK(r.trace.non_increasing());
            CHECK(r.best_cost.total >= d.bf.best_cost);
        }
    }
    SECTION("budget") {
        p.max_evaluations = 8;
        const auto r = heuristic_search_optimize(d.ev, p, PVConfigVector(d.net.pv_count(), Phase::a));
        CHECK(r.evaluations == 8);
    }
    CHECK_THROWS_AS(heuristic_search_optimize(d.ev, p, PVConfigVector(2, Phase::a)), std::invalid_argument);
}
