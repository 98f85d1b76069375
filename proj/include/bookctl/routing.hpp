#pragma once

#include <vector>

#include "bookctl/geometry.hpp"
#include "bookctl/instance.hpp"

namespace bookctl {

// Post-split routing input: one customer per demand item, every demand in
// (0, Q], K vehicles available.
struct RoutingProblem {
    std::vector<Point> coords;
    std::vector<int> demands;
    Point depot;
    int Q = 1;
    int K = 0;
};

// Customers with w_j > 0 become routing customers; a demand above Q is split
// into full-capacity virtual customers at the same coordinate plus one
// remainder customer.
RoutingProblem make_routing_problem(const std::vector<int>& w, const InstanceSpec& spec, int K);

struct VrpSolution {
    std::vector<std::vector<int>> routes;  // customer indices; depot implicit at both ends
    double cost = 0.0;
    int K_used = 0;
};

// Exact bin packing: FFD upper bound, Martello-Toth L2 lower bound, then
// branch and bound to optimality. Items must each fit in one bin.
struct BinPacking {
    int bins = 0;
    std::vector<int> assignment;  // bin index per item
};
BinPacking pack_bins(const std::vector<int>& items, int Q);
int min_bins(const std::vector<int>& items, int Q);

// Minimum fleet able to carry state w: exact bin packing of the pre-split
// per-location demands.
int min_vehicles(const std::vector<int>& w, int Q);

// Savings construction respecting K followed by best-improvement local
// search (intra-route 2-opt, inter-route relocate and swap). Deterministic;
// ties break on the lowest index. Throws if min_bins(demands) > K.
VrpSolution solve_cvrp(const RoutingProblem& problem);

// As solve_cvrp, but records the cost after every applied move and returns
// the sweep count. Used by invariant tests and the parallel benchmark.
int solve_cvrp_instrumented(const RoutingProblem& problem, std::vector<double>* sweep_costs,
                            VrpSolution* out);

// Provably optimal solution for problems with at most 8 customers
// (test oracle). Same feasibility rules as solve_cvrp.
VrpSolution exact_cvrp(const RoutingProblem& problem);

double solution_cost(const RoutingProblem& problem, const std::vector<std::vector<int>>& routes);

// End-of-horizon cost of state w: Gamma = -(z* + C * outsourced vehicles),
// zero exactly when w = 0.
struct OperationalCost {
    double gamma = 0.0;
    int K = 0;
    double z_star = 0.0;
    int outsourced = 0;
};

OperationalCost operational_cost(const std::vector<int>& w, const InstanceSpec& spec);

}  // namespace bookctl
