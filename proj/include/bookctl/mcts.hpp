#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bookctl/instance.hpp"
#include "bookctl/policies.hpp"
#include "bookctl/policy.hpp"
#include "bookctl/rng.hpp"

namespace bookctl {

enum class MctsBase { random, sarsa };

struct MctsConfig {
    int simulations = 30;
    double exploration = 1.0;  // UCT constant c
    MctsBase base = MctsBase::random;
};

// Instrumentation for invariant tests.
struct MctsTrace {
    int simulations = 0;
    bool conservation_ok = true;  // node visits == sum of action counts after every backup
    int root_visits = 0;
    std::size_t tree_nodes = 0;
};

// Selection rule of the search: the action maximizing W/N plus
// c * sqrt(ln(parent)/N). Unvisited actions are taken first, lowest index
// first; action 0 rejects, action 1 accepts.
int uct_select(const std::array<int, 2>& N, const std::array<double, 2>& W, int parent_visits,
               double c);

// Closed-loop UCT from decision point (state, j): selection by mean value
// plus c*sqrt(ln N / N_a) with unvisited actions first (lowest index first),
// chance transitions resampled from the arrival table each simulation,
// rollouts under the base policy, terminal value from the cost source.
// Returns the most-visited action; ties prefer the larger mean, then reject.
bool mcts_decide(const BookingState& state, int j, const InstanceSpec& spec,
                 const ArrivalTable& table, const TerminalCost& terminal, const MctsConfig& config,
                 Policy* base_policy, Rng& rng, MctsTrace* trace = nullptr);

class MctsPolicy : public Policy {
  public:
    MctsPolicy(MctsConfig config, std::shared_ptr<const InstanceSpec> spec,
               TerminalCost terminal, std::unique_ptr<Policy> base_policy, std::uint64_t seed);

    bool decide(const BookingState& state, int j) override;
    void begin_episode(std::uint64_t episode_seed) override;
    std::string name() const override;
    std::unique_ptr<Policy> clone() const override;

  private:
    MctsConfig config_;
    std::shared_ptr<const InstanceSpec> spec_;
    ArrivalTable table_;
    TerminalCost terminal_;
    std::unique_ptr<Policy> base_;
    std::uint64_t seed_;
    Rng rng_;
};

}  // namespace bookctl
