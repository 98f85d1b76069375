#include "bookctl/routing.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bookctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Node 0 is the depot; customer c maps to node c + 1.
struct DistMatrix {
    int m = 0;
    std::vector<double> d;

    double operator()(int a, int b) const { return d[static_cast<std::size_t>(a) * (m + 1) + b]; }
};

DistMatrix build_distances(const RoutingProblem& p) {
    DistMatrix D;
    D.m = static_cast<int>(p.coords.size());
    D.d.assign(static_cast<std::size_t>(D.m + 1) * (D.m + 1), 0.0);
    auto point = [&](int node) { return node == 0 ? p.depot : p.coords[node - 1]; };
    for (int a = 0; a <= D.m; ++a) {
        for (int b = 0; b <= D.m; ++b) {
            D.d[static_cast<std::size_t>(a) * (D.m + 1) + b] = distance(point(a), point(b));
        }
    }
    return D;
}

// Martello-Toth L2 lower bound, maximized over the integer thresholds.
int l2_lower_bound(const std::vector<int>& sizes, int Q) {
    long total = 0;
    for (int s : sizes) total += s;
    int lb = static_cast<int>((total + Q - 1) / Q);
    for (int alpha = 0; alpha <= Q / 2; ++alpha) {
        int n1 = 0, n2 = 0;
        long sum2 = 0, sum3 = 0;
        for (int s : sizes) {
            if (s > Q - alpha) {
                ++n1;
            } else if (2 * s > Q) {
                ++n2;
                sum2 += s;
            } else if (s >= alpha) {
                sum3 += s;
            }
        }
        const long cap2 = static_cast<long>(n2) * Q - sum2;
        const int extra = sum3 > cap2 ? static_cast<int>((sum3 - cap2 + Q - 1) / Q) : 0;
        lb = std::max(lb, n1 + n2 + extra);
    }
    return lb;
}

struct BinPackSearch {
    const std::vector<int>& size;  // sorted descending
    int Q;
    int best;
    std::vector<int> loads;
    std::vector<int> assign;
    std::vector<int> best_assign;
    std::vector<long> suffix;

    void run(std::size_t idx) {
        if (static_cast<int>(loads.size()) >= best) return;
        if (idx == size.size()) {
            best = static_cast<int>(loads.size());
            best_assign = assign;
            return;
        }
        long slack = 0;
        for (int l : loads) slack += Q - l;
        const long remaining = suffix[idx];
        const int extra =
            remaining > slack ? static_cast<int>((remaining - slack + Q - 1) / Q) : 0;
        if (static_cast<int>(loads.size()) + extra >= best) return;

        const int s = size[idx];
        // An exact fit dominates every other placement of this item.
        for (std::size_t b = 0; b < loads.size(); ++b) {
            if (Q - loads[b] == s) {
                assign[idx] = static_cast<int>(b);
                loads[b] += s;
                run(idx + 1);
                loads[b] -= s;
                return;
            }
        }
        // Bins with equal residual capacity are interchangeable.
        std::vector<int> seen;
        for (std::size_t b = 0; b < loads.size(); ++b) {
            const int res = Q - loads[b];
            if (res < s) continue;
            if (std::find(seen.begin(), seen.end(), res) != seen.end()) continue;
            seen.push_back(res);
            assign[idx] = static_cast<int>(b);
            loads[b] += s;
            run(idx + 1);
            loads[b] -= s;
        }
        if (static_cast<int>(loads.size()) + 1 < best) {
            assign[idx] = static_cast<int>(loads.size());
            loads.push_back(s);
            run(idx + 1);
            loads.pop_back();
        }
    }
};

}  // namespace

BinPacking pack_bins(const std::vector<int>& items, int Q) {
    if (Q < 1) throw std::invalid_argument("routing: capacity must be >= 1");
    for (int s : items) {
        if (s <= 0 || s > Q) {
            throw std::invalid_argument("routing: bin packing item outside (0, Q]");
        }
    }
    BinPacking result;
    result.assignment.assign(items.size(), -1);
    if (items.empty()) return result;

    std::vector<int> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (items[a] != items[b]) return items[a] > items[b];
        return a < b;
    });
    std::vector<int> sorted(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = items[order[i]];

    // First fit decreasing gives the incumbent.
    std::vector<int> ffd_assign(sorted.size(), -1);
    std::vector<int> loads;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        bool placed = false;
        for (std::size_t b = 0; b < loads.size(); ++b) {
            if (loads[b] + sorted[i] <= Q) {
                loads[b] += sorted[i];
                ffd_assign[i] = static_cast<int>(b);
                placed = true;
                break;
            }
        }
        if (!placed) {
            ffd_assign[i] = static_cast<int>(loads.size());
            loads.push_back(sorted[i]);
        }
    }
    int bins = static_cast<int>(loads.size());
    std::vector<int> best_assign = ffd_assign;

    const int lb = l2_lower_bound(sorted, Q);
    if (bins > lb) {
        BinPackSearch search{sorted, Q, bins, {}, std::vector<int>(sorted.size(), -1), best_assign, {}};
        search.suffix.assign(sorted.size() + 1, 0);
        for (std::size_t i = sorted.size(); i-- > 0;) {
            search.suffix[i] = search.suffix[i + 1] + sorted[i];
        }
        search.run(0);
        bins = search.best;
        best_assign = search.best_assign;
    }

    result.bins = bins;
    for (std::size_t i = 0; i < order.size(); ++i) {
        result.assignment[order[i]] = best_assign[i];
    }
    return result;
}

int min_bins(const std::vector<int>& items, int Q) { return pack_bins(items, Q).bins; }

namespace {

std::vector<int> split_items(const std::vector<int>& w, int Q) {
    std::vector<int> items;
    for (int d : w) {
        if (d < 0) throw std::invalid_argument("routing: negative demand");
        for (int k = 0; k < d / Q; ++k) items.push_back(Q);
        if (d % Q != 0) items.push_back(d % Q);
    }
    return items;
}

}  // namespace

int min_vehicles(const std::vector<int>& w, int Q) { return min_bins(split_items(w, Q), Q); }

RoutingProblem make_routing_problem(const std::vector<int>& w, const InstanceSpec& spec, int K) {
    if (static_cast<int>(w.size()) != spec.n) {
        throw std::invalid_argument("routing: state length != n");
    }
    RoutingProblem p;
    p.depot = spec.depot;
    p.Q = spec.Q;
    p.K = K;
    for (int j = 0; j < spec.n; ++j) {
        const int d = w[j];
        if (d < 0) throw std::invalid_argument("routing: negative demand");
        for (int k = 0; k < d / spec.Q; ++k) {
            p.coords.push_back(spec.coords[j]);
            p.demands.push_back(spec.Q);
        }
        if (d % spec.Q != 0) {
            p.coords.push_back(spec.coords[j]);
            p.demands.push_back(d % spec.Q);
        }
    }
    return p;
}

double solution_cost(const RoutingProblem& problem, const std::vector<std::vector<int>>& routes) {
    double cost = 0.0;
    for (const auto& route : routes) {
        if (route.empty()) continue;
        Point prev = problem.depot;
        for (int c : route) {
            cost += distance(prev, problem.coords[c]);
            prev = problem.coords[c];
        }
        cost += distance(prev, problem.depot);
    }
    return cost;
}

namespace {

std::vector<std::vector<int>> clarke_wright(const RoutingProblem& p, const DistMatrix& D) {
    const int m = static_cast<int>(p.demands.size());
    std::vector<std::vector<int>> routes(m);
    std::vector<int> route_of(m), load(m);
    for (int c = 0; c < m; ++c) {
        routes[c] = {c};
        route_of[c] = c;
        load[c] = p.demands[c];
    }

    struct Saving {
        double s;
        int i, j;
    };
    std::vector<Saving> savings;
    savings.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            savings.push_back({D(0, i + 1) + D(0, j + 1) - D(i + 1, j + 1), i, j});
        }
    }
    std::sort(savings.begin(), savings.end(), [](const Saving& a, const Saving& b) {
        if (a.s != b.s) return a.s > b.s;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    // Euclidean savings are never negative, so merging continues until
    // capacity blocks every endpoint pair; passes repeat because merges can
    // expose endpoints for pairs already scanned.
    bool merged = true;
    while (merged) {
        merged = false;
        for (const auto& sv : savings) {
            const int ri = route_of[sv.i];
            const int rj = route_of[sv.j];
            if (ri == rj) continue;
            if (load[ri] + load[rj] > p.Q) continue;
            auto& A = routes[ri];
            auto& B = routes[rj];
            const bool i_front = A.front() == sv.i;
            const bool i_back = A.back() == sv.i;
            const bool j_front = B.front() == sv.j;
            const bool j_back = B.back() == sv.j;
            if ((!i_front && !i_back) || (!j_front && !j_back)) continue;
            if (i_front && !i_back) std::reverse(A.begin(), A.end());
            if (j_back && !j_front) std::reverse(B.begin(), B.end());
            for (int c : B) {
                A.push_back(c);
                route_of[c] = ri;
            }
            load[ri] += load[rj];
            B.clear();
            load[rj] = 0;
            merged = true;
        }
    }

    std::vector<std::vector<int>> result;
    for (auto& route : routes) {
        if (!route.empty()) result.push_back(std::move(route));
    }
    return result;
}

// Route-merging can get capacity-stuck above K even when a K-bin packing
// exists; rebuild from the exact packing in that case (nearest-neighbor
// order inside each bin, local search cleans up afterwards).
std::vector<std::vector<int>> packing_routes(const RoutingProblem& p, const DistMatrix& D) {
    const BinPacking packing = pack_bins(p.demands, p.Q);
    std::vector<std::vector<int>> groups(packing.bins);
    for (std::size_t c = 0; c < p.demands.size(); ++c) {
        groups[packing.assignment[c]].push_back(static_cast<int>(c));
    }
    std::vector<std::vector<int>> routes;
    for (auto& group : groups) {
        std::vector<int> route;
        int current = 0;
        std::vector<bool> used(group.size(), false);
        for (std::size_t step = 0; step < group.size(); ++step) {
            int pick = -1;
            double best = kInf;
            for (std::size_t g = 0; g < group.size(); ++g) {
                if (used[g]) continue;
                const double d = D(current, group[g] + 1);
                if (d < best) {
                    best = d;
                    pick = static_cast<int>(g);
                }
            }
            used[pick] = true;
            route.push_back(group[pick]);
            current = group[pick] + 1;
        }
        routes.push_back(std::move(route));
    }
    return routes;
}

struct Move {
    int kind = -1;  // 0 = 2-opt, 1 = relocate, 2 = swap
    int r1 = 0, a = 0, r2 = 0, b = 0;
};

// Best-improvement sweeps: every sweep scans all three neighborhoods, applies
// the single cheapest strictly improving move, and repeats to a local
// optimum (bounded sweep count keeps termination independent of float
// noise).
int local_search(const RoutingProblem& p, const DistMatrix& D, std::vector<std::vector<int>>& routes,
                 std::vector<double>* sweep_costs, int max_sweeps = 1000) {
    std::vector<int> load(routes.size(), 0);
    for (std::size_t r = 0; r < routes.size(); ++r) {
        for (int c : routes[r]) load[r] += p.demands[c];
    }
    int sweeps = 0;
    while (sweeps < max_sweeps) {
        double best_delta = -1e-9;
        Move move;

        for (std::size_t r = 0; r < routes.size(); ++r) {
            const auto& R = routes[r];
            const int L = static_cast<int>(R.size());
            for (int i = 0; i < L - 1; ++i) {
                const int prev = i == 0 ? 0 : R[i - 1] + 1;
                for (int j = i + 1; j < L; ++j) {
                    const int next = j == L - 1 ? 0 : R[j + 1] + 1;
                    const double delta = D(prev, R[j] + 1) + D(R[i] + 1, next) -
                                         D(prev, R[i] + 1) - D(R[j] + 1, next);
                    if (delta < best_delta) {
                        best_delta = delta;
                        move = {0, static_cast<int>(r), i, static_cast<int>(r), j};
                    }
                }
            }
        }

        for (std::size_t r1 = 0; r1 < routes.size(); ++r1) {
            const auto& R1 = routes[r1];
            const int L1 = static_cast<int>(R1.size());
            for (int i = 0; i < L1; ++i) {
                const int u = R1[i];
                const int prev = i == 0 ? 0 : R1[i - 1] + 1;
                const int next = i == L1 - 1 ? 0 : R1[i + 1] + 1;
                const double removal = D(prev, u + 1) + D(u + 1, next) - D(prev, next);
                for (std::size_t r2 = 0; r2 < routes.size(); ++r2) {
                    if (r1 == r2) continue;
                    if (load[r2] + p.demands[u] > p.Q) continue;
                    const auto& R2 = routes[r2];
                    const int L2 = static_cast<int>(R2.size());
                    for (int k = 0; k <= L2; ++k) {
                        const int a = k == 0 ? 0 : R2[k - 1] + 1;
                        const int b = k == L2 ? 0 : R2[k] + 1;
                        const double insertion = D(a, u + 1) + D(u + 1, b) - D(a, b);
                        const double delta = insertion - removal;
                        if (delta < best_delta) {
                            best_delta = delta;
                            move = {1, static_cast<int>(r1), i, static_cast<int>(r2), k};
                        }
                    }
                }
            }
        }

        for (std::size_t r1 = 0; r1 < routes.size(); ++r1) {
            for (std::size_t r2 = r1 + 1; r2 < routes.size(); ++r2) {
                const auto& R1 = routes[r1];
                const auto& R2 = routes[r2];
                const int L1 = static_cast<int>(R1.size());
                const int L2 = static_cast<int>(R2.size());
                for (int i = 0; i < L1; ++i) {
                    const int u = R1[i];
                    const int p1 = i == 0 ? 0 : R1[i - 1] + 1;
                    const int n1 = i == L1 - 1 ? 0 : R1[i + 1] + 1;
                    for (int j = 0; j < L2; ++j) {
                        const int v = R2[j];
                        if (load[r1] - p.demands[u] + p.demands[v] > p.Q) continue;
                        if (load[r2] - p.demands[v] + p.demands[u] > p.Q) continue;
                        const int p2 = j == 0 ? 0 : R2[j - 1] + 1;
                        const int n2 = j == L2 - 1 ? 0 : R2[j + 1] + 1;
                        const double delta = D(p1, v + 1) + D(v + 1, n1) - D(p1, u + 1) -
                                             D(u + 1, n1) + D(p2, u + 1) + D(u + 1, n2) -
                                             D(p2, v + 1) - D(v + 1, n2);
                        if (delta < best_delta) {
                            best_delta = delta;
                            move = {2, static_cast<int>(r1), i, static_cast<int>(r2), j};
                        }
                    }
                }
            }
        }

        if (move.kind < 0) break;
        ++sweeps;
        if (move.kind == 0) {
            auto& R = routes[move.r1];
            std::reverse(R.begin() + move.a, R.begin() + move.b + 1);
        } else if (move.kind == 1) {
            const int u = routes[move.r1][move.a];
            routes[move.r1].erase(routes[move.r1].begin() + move.a);
            routes[move.r2].insert(routes[move.r2].begin() + move.b, u);
            load[move.r1] -= p.demands[u];
            load[move.r2] += p.demands[u];
            if (routes[move.r1].empty()) {
                routes.erase(routes.begin() + move.r1);
                load.erase(load.begin() + move.r1);
            }
        } else {
            const int u = routes[move.r1][move.a];
            const int v = routes[move.r2][move.b];
            routes[move.r1][move.a] = v;
            routes[move.r2][move.b] = u;
            load[move.r1] += p.demands[v] - p.demands[u];
            load[move.r2] += p.demands[u] - p.demands[v];
        }
        if (sweep_costs) sweep_costs->push_back(solution_cost(p, routes));
    }
    return sweeps;
}

void validate_problem(const RoutingProblem& p) {
    if (p.Q < 1) throw std::invalid_argument("routing: capacity must be >= 1");
    for (int d : p.demands) {
        if (d <= 0 || d > p.Q) {
            throw std::invalid_argument("routing: customer demand outside (0, Q]");
        }
    }
}

}  // namespace

VrpSolution solve_cvrp(const RoutingProblem& problem) {
    validate_problem(problem);
    VrpSolution solution;
    if (problem.demands.empty()) return solution;
    if (min_bins(problem.demands, problem.Q) > problem.K) {
        throw std::runtime_error("routing: infeasible, " +
                                 std::to_string(min_bins(problem.demands, problem.Q)) +
                                 " vehicles needed but K = " + std::to_string(problem.K));
    }
    const DistMatrix D = build_distances(problem);
    auto routes = clarke_wright(problem, D);
    if (static_cast<int>(routes.size()) > problem.K) {
        routes = packing_routes(problem, D);
    }
    local_search(problem, D, routes, nullptr);
    solution.routes = std::move(routes);
    solution.cost = solution_cost(problem, solution.routes);
    solution.K_used = static_cast<int>(solution.routes.size());
    return solution;
}

int solve_cvrp_instrumented(const RoutingProblem& problem, std::vector<double>* sweep_costs,
                            VrpSolution* out) {
    validate_problem(problem);
    if (min_bins(problem.demands, problem.Q) > problem.K) {
        throw std::runtime_error("routing: infeasible, K too small");
    }
    const DistMatrix D = build_distances(problem);
    auto routes = clarke_wright(problem, D);
    if (static_cast<int>(routes.size()) > problem.K) {
        routes = packing_routes(problem, D);
    }
    const int sweeps = local_search(problem, D, routes, sweep_costs);
    if (out) {
        out->routes = routes;
        out->cost = solution_cost(problem, routes);
        out->K_used = static_cast<int>(routes.size());
    }
    return sweeps;
}

VrpSolution exact_cvrp(const RoutingProblem& problem) {
    validate_problem(problem);
    const int m = static_cast<int>(problem.demands.size());
    if (m > 8) {
        throw std::invalid_argument("routing: exact solver limited to 8 customers, got " +
                                    std::to_string(m));
    }
    VrpSolution solution;
    if (m == 0) return solution;

    const DistMatrix D = build_distances(problem);
    const int full = (1 << m) - 1;

    std::vector<int> subset_demand(full + 1, 0);
    for (int S = 1; S <= full; ++S) {
        const int low = __builtin_ctz(S);
        subset_demand[S] = subset_demand[S & (S - 1)] + problem.demands[low];
    }

    // Held-Karp paths depot -> ... -> i over every subset.
    std::vector<std::array<double, 8>> dp(full + 1);
    std::vector<std::array<signed char, 8>> parent(full + 1);
    for (auto& row : dp) row.fill(kInf);
    for (auto& row : parent) row.fill(-1);
    for (int i = 0; i < m; ++i) dp[1 << i][i] = D(0, i + 1);
    for (int S = 1; S <= full; ++S) {
        for (int i = 0; i < m; ++i) {
            if (!(S & (1 << i)) || dp[S][i] == kInf) continue;
            for (int j = 0; j < m; ++j) {
                if (S & (1 << j)) continue;
                const int S2 = S | (1 << j);
                const double cand = dp[S][i] + D(i + 1, j + 1);
                if (cand < dp[S2][j]) {
                    dp[S2][j] = cand;
                    parent[S2][j] = static_cast<signed char>(i);
                }
            }
        }
    }
    std::vector<double> tour(full + 1, kInf);
    std::vector<int> tour_last(full + 1, -1);
    for (int S = 1; S <= full; ++S) {
        if (subset_demand[S] > problem.Q) continue;
        for (int i = 0; i < m; ++i) {
            if (!(S & (1 << i)) || dp[S][i] == kInf) continue;
            const double cand = dp[S][i] + D(i + 1, 0);
            if (cand < tour[S]) {
                tour[S] = cand;
                tour_last[S] = i;
            }
        }
    }

    // Partition into at most K capacity-feasible tours; always carve the
    // group holding the lowest remaining customer.
    const int kmax = std::min(problem.K, m);
    if (kmax < 1) throw std::runtime_error("routing: infeasible, K < 1");
    std::vector<std::vector<double>> f(kmax + 1, std::vector<double>(full + 1, kInf));
    std::vector<std::vector<int>> choice(kmax + 1, std::vector<int>(full + 1, 0));
    for (int k = 0; k <= kmax; ++k) f[k][0] = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        for (int S = 1; S <= full; ++S) {
            const int low = S & (-S);
            for (int sub = S; sub > 0; sub = (sub - 1) & S) {
                if (!(sub & low) || tour[sub] == kInf) continue;
                const double rest = f[k - 1][S ^ sub];
                if (rest == kInf) continue;
                const double cand = tour[sub] + rest;
                if (cand < f[k][S]) {
                    f[k][S] = cand;
                    choice[k][S] = sub;
                }
            }
        }
    }
    if (f[kmax][full] == kInf) {
        throw std::runtime_error("routing: infeasible, no K-vehicle partition exists");
    }

    int S = full;
    int k = kmax;
    while (S != 0) {
        const int sub = choice[k][S];
        std::vector<int> route;
        int node = tour_last[sub];
        int rem = sub;
        while (node >= 0) {
            route.push_back(node);
            const int prev = parent[rem][node];
            rem ^= 1 << node;
            node = prev;
        }
        std::reverse(route.begin(), route.end());
        solution.routes.push_back(std::move(route));
        S ^= sub;
        --k;
    }
    solution.cost = solution_cost(problem, solution.routes);
    solution.K_used = static_cast<int>(solution.routes.size());
    return solution;
}

OperationalCost operational_cost(const std::vector<int>& w, const InstanceSpec& spec) {
    bool empty = true;
    for (int d : w) {
        if (d < 0) throw std::invalid_argument("routing: negative demand");
        if (d > 0) empty = false;
    }
    OperationalCost result;
    if (empty) return result;

    const int K = std::max(spec.K0, min_vehicles(w, spec.Q));
    const VrpSolution sol = solve_cvrp(make_routing_problem(w, spec, K));
    result.K = K;
    result.z_star = sol.cost;
    result.outsourced = K - spec.K0;
    result.gamma = -(sol.cost + spec.C * result.outsourced);
    return result;
}

}  // namespace bookctl
