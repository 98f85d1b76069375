#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "bookctl/forest.hpp"
#include "bookctl/hash.hpp"
#include "bookctl/instance.hpp"
#include "bookctl/parallel.hpp"
#include "bookctl/policy.hpp"
#include "bookctl/rng.hpp"

namespace bookctl {

// Source of the end-of-horizon value: the exact routing stack or the learned
// surrogate. Helpers capture their inputs as shared_ptr so policies can be
// cloned across threads without lifetime concerns.
using TerminalCost = std::function<double(const std::vector<int>&)>;

TerminalCost exact_terminal(std::shared_ptr<const InstanceSpec> spec);
TerminalCost surrogate_terminal(std::shared_ptr<const ForestModel> model,
                                std::shared_ptr<const InstanceSpec> spec);

// Expected-profit values for every reachable state (sum(w) <= t - 1),
// t in 1..T+1, keyed sparsely per layer.
class ValueTable {
  public:
    struct Layer {
        std::vector<std::vector<int>> states;
        std::vector<double> values;
        std::unordered_map<std::vector<int>, std::size_t, IntVectorHash> index;
    };

    int T = 0;
    int n = 0;
    std::string terminal_kind;  // "exact" or "ml"
    std::uint64_t instance_hash = 0;
    std::vector<Layer> layers;  // layers[1..T+1]; index 0 unused

    double value(int t, const std::vector<int>& w) const;
    const double* find(int t, const std::vector<int>& w) const;
    std::size_t state_count() const;

    void rebuild_indices();
};

struct DpOptions {
    double state_cap = 2e7;  // total states across layers
    Exec exec = Exec::parallel;
};

// Backward induction over all reachable states with normalized arrival
// probabilities; each distinct terminal state is costed exactly once.
// Throws if the reachable state space exceeds the cap.
ValueTable dp_solve(const InstanceSpec& spec, const TerminalCost& terminal,
                    const std::string& terminal_kind, const DpOptions& opts = {});

// Accept iff p_j + V_{t+1}(w + e_j) > V_{t+1}(w); ties reject.
bool dp_decide(const ValueTable& table, const BookingState& state, int j,
               const InstanceSpec& spec);

// Right-hand side of the value recursion at (t, w), recomputed from the
// stored layer t + 1 (consistency checks).
double bellman_rhs(const ValueTable& table, const ArrivalTable& arrivals,
                   const InstanceSpec& spec, int t, const std::vector<int>& w);

class DpPolicy : public Policy {
  public:
    DpPolicy(std::shared_ptr<const ValueTable> table, std::shared_ptr<const InstanceSpec> spec,
             std::string name);

    bool decide(const BookingState& state, int j) override;
    std::string name() const override { return name_; }
    std::unique_ptr<Policy> clone() const override;

    const ValueTable& table() const { return *table_; }

  private:
    std::shared_ptr<const ValueTable> table_;
    std::shared_ptr<const InstanceSpec> spec_;
    std::string name_;
};

// Stationary baseline: accept each request independently with probability p.
bool rand_p_decide(double p, Rng& rng);

class RandPPolicy : public Policy {
  public:
    RandPPolicy(double p, std::uint64_t seed);

    bool decide(const BookingState& state, int j) override;
    void begin_episode(std::uint64_t episode_seed) override;
    std::string name() const override;
    std::unique_ptr<Policy> clone() const override;

    double p() const { return p_; }

  private:
    double p_;
    std::uint64_t seed_;
    Rng rng_;
};

// Value-table policy file I/O (sparse (t, w) -> value entries).
void save_value_table(const ValueTable& table, const std::string& path);
ValueTable load_value_table(const std::string& path);

}  // namespace bookctl
