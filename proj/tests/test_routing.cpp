#include "bookctl/routing.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bookctl;
using namespace testsupport;

namespace {

RoutingProblem random_problem(Rng& rng, int max_customers, int K) {
    RoutingProblem p;
    const int m = rng.uniform_int(1, max_customers);
    p.Q = rng.uniform_int(3, 8);
    p.K = K;
    p.depot = {rng.uniform() * 10.0, rng.uniform() * 10.0};
    for (int c = 0; c < m; ++c) {
        p.coords.push_back({rng.uniform() * 10.0, rng.uniform() * 10.0});
        p.demands.push_back(rng.uniform_int(1, p.Q));
    }
    return p;
}

}  // namespace

TEST_CASE("min_vehicles examples") {
    CHECK(min_vehicles({3, 3, 3}, 6) == 2);
    CHECK(brute_force_min_bins({3, 3, 3}, 6) == 2);
    CHECK(min_vehicles({0, 0}, 5) == 0);
    CHECK(min_vehicles({7}, 5) == 2);  // splits into (5, 2)
    CHECK(brute_force_min_bins({5, 2}, 5) == 2);
}

TEST_CASE("exact bin packing matches the exhaustive oracle on random multisets") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const int Q = rng.uniform_int(2, 10);
        const int count = rng.uniform_int(1, 12);
        std::vector<int> items(count);
        for (int& s : items) s = rng.uniform_int(1, Q);
        CHECK(min_bins(items, Q) == brute_force_min_bins(items, Q));
    }
}

TEST_CASE("bin packing assignment is feasible and uses the reported bins") {
    Rng rng(78);
    for (int trial = 0; trial < 50; ++trial) {
        const int Q = rng.uniform_int(2, 9);
        std::vector<int> items(rng.uniform_int(1, 11));
        for (int& s : items) s = rng.uniform_int(1, Q);
        const BinPacking packing = pack_bins(items, Q);
        std::vector<int> loads(packing.bins, 0);
        for (std::size_t i = 0; i < items.size(); ++i) {
            REQUIRE(packing.assignment[i] >= 0);
            REQUIRE(packing.assignment[i] < packing.bins);
            loads[packing.assignment[i]] += items[i];
        }
        for (int load : loads) {
            CHECK(load > 0);
            CHECK(load <= Q);
        }
    }
}

TEST_CASE("min_vehicles is monotone under entrywise demand increase") {
    Rng rng(79);
    for (int trial = 0; trial < 100; ++trial) {
        const int Q = rng.uniform_int(2, 8);
        std::vector<int> w(rng.uniform_int(1, 5));
        for (int& v : w) v = rng.uniform_int(0, 12);
        std::vector<int> larger = w;
        larger[rng.uniform_int(0, static_cast<int>(w.size()) - 1)] += rng.uniform_int(1, 4);
        CHECK(min_vehicles(larger, Q) >= min_vehicles(w, Q));
    }
}

TEST_CASE("solve_cvrp textbook cases") {
    RoutingProblem single;
    single.coords = {{3.0, 4.0}};
    single.demands = {1};
    single.depot = {0.0, 0.0};
    single.Q = 5;
    single.K = 3;
    const VrpSolution out = solve_cvrp(single);
    CHECK(out.cost == doctest::Approx(10.0));
    CHECK(out.K_used == 1);
    CHECK(out.routes.size() == 1);

    RoutingProblem line;
    line.coords = {{1.0, 0.0}, {2.0, 0.0}};
    line.demands = {1, 1};
    line.depot = {0.0, 0.0};
    line.Q = 2;
    line.K = 1;
    const VrpSolution chained = solve_cvrp(line);
    CHECK(chained.cost == doctest::Approx(4.0));
    CHECK(chained.K_used == 1);

    RoutingProblem infeasible = line;
    infeasible.Q = 1;  // needs two vehicles
    CHECK_THROWS(solve_cvrp(infeasible));
}

TEST_CASE("exact_cvrp matches brute force on small instances") {
    Rng rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        RoutingProblem p = random_problem(rng, 5, rng.uniform_int(1, 3));
        if (min_bins(p.demands, p.Q) > p.K) {
            CHECK_THROWS(exact_cvrp(p));
            continue;
        }
        const VrpSolution exact = exact_cvrp(p);
        CHECK(exact.cost == doctest::Approx(brute_force_cvrp_cost(p)).epsilon(1e-9));
        CHECK(exact.K_used <= p.K);
        std::vector<int> seen(p.demands.size(), 0);
        for (const auto& route : exact.routes) {
            int load = 0;
            for (int c : route) {
                seen[c] += 1;
                load += p.demands[c];
            }
            CHECK(load <= p.Q);
        }
        for (int s : seen) CHECK(s == 1);
    }
    RoutingProblem big = random_problem(rng, 5, 2);
    big.coords.resize(9, {0.0, 0.0});
    big.demands.resize(9, 1);
    big.Q = 9;
    CHECK_THROWS(exact_cvrp(big));
}

TEST_CASE("forced split into two round trips") {
    RoutingProblem p;
    p.coords = {{1.0, 0.0}, {0.0, 1.0}};
    p.demands = {2, 2};
    p.depot = {0.0, 0.0};
    p.Q = 2;
    p.K = 2;
    const VrpSolution exact = exact_cvrp(p);
    CHECK(exact.K_used == 2);
    CHECK(exact.cost == doctest::Approx(4.0));
}

TEST_CASE("heuristic stays within 5 percent of the exact optimum") {
    Rng rng(555);
    int evaluated = 0;
    while (evaluated < 60) {
        RoutingProblem p = random_problem(rng, 7, rng.uniform_int(1, 3));
        if (min_bins(p.demands, p.Q) > p.K) continue;
        ++evaluated;
        const double exact = exact_cvrp(p).cost;
        const double heuristic = solve_cvrp(p).cost;
        CHECK(heuristic >= exact - 1e-9);
        CHECK(heuristic <= exact * 1.05 + 1e-9);
    }
}

TEST_CASE("heuristic solutions satisfy all feasibility rules") {
    Rng rng(556);
    for (int trial = 0; trial < 80; ++trial) {
        RoutingProblem p = random_problem(rng, 12, 0);
        p.K = std::max(1, min_bins(p.demands, p.Q));
        const VrpSolution out = solve_cvrp(p);
        CHECK(out.K_used <= p.K);
        CHECK(out.cost == doctest::Approx(solution_cost(p, out.routes)));
        std::vector<int> seen(p.demands.size(), 0);
        for (const auto& route : out.routes) {
            int load = 0;
            for (int c : route) {
                seen[c] += 1;
                load += p.demands[c];
            }
            CHECK(load <= p.Q);
        }
        for (int s : seen) CHECK(s == 1);
    }
}

TEST_CASE("each applied local-search move strictly decreases the cost") {
    Rng rng(557);
    for (int trial = 0; trial < 20; ++trial) {
        RoutingProblem p = random_problem(rng, 10, 0);
        p.K = std::max(1, min_bins(p.demands, p.Q));
        std::vector<double> costs;
        VrpSolution out;
        const int sweeps = solve_cvrp_instrumented(p, &costs, &out);
        CHECK(sweeps == static_cast<int>(costs.size()));
        CHECK(sweeps < 1000);
        for (std::size_t i = 1; i < costs.size(); ++i) {
            CHECK(costs[i] < costs[i - 1]);
        }
    }
}

TEST_CASE("operational cost examples") {
    const auto zero = operational_cost({0, 0, 0, 0}, build_family(4, 1));
    CHECK(zero.gamma == 0.0);
    CHECK(zero.K == 0);
    CHECK(zero.outsourced == 0);

    // One location one unit from the depot: a single round trip.
    const InstanceSpec unit = micro_instance();
    const auto round_trip = operational_cost({1}, unit);
    CHECK(round_trip.gamma == doctest::Approx(-2.0));
    CHECK(round_trip.K == 1);
    CHECK(round_trip.outsourced == 0);

    // Two units at unit capacity force a second, outsourced vehicle.
    const auto outsourced = operational_cost({2}, unit);
    CHECK(outsourced.K == 2);
    CHECK(outsourced.outsourced == 1);
    CHECK(outsourced.z_star == doctest::Approx(4.0));
    CHECK(outsourced.gamma == doctest::Approx(-104.0));
}

TEST_CASE("gamma is non-positive and zero only at the empty state") {
    const InstanceSpec spec = build_family(4, 31);
    Rng rng(600);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<int> w(spec.n);
        for (int& v : w) v = rng.uniform_int(0, 5);
        const auto cost = operational_cost(w, spec);
        int total = 0;
        for (int v : w) total += v;
        if (total == 0) {
            CHECK(cost.gamma == 0.0);
        } else {
            CHECK(cost.gamma < 0.0);
        }
    }
}

TEST_CASE("demands above capacity are split into virtual customers") {
    const InstanceSpec spec = build_family(4, 31);  // Q = 10
    const RoutingProblem p = make_routing_problem({21, 0, 1, 0}, spec, 4);
    REQUIRE(p.demands.size() == 4);
    CHECK(p.demands == std::vector<int>{10, 10, 1, 1});
    CHECK(p.coords[0].x == p.coords[1].x);
    CHECK(p.coords[0].x == p.coords[2].x);
    CHECK(p.coords[3].x == spec.coords[2].x);
}
