#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bookctl/instance.hpp"
#include "bookctl/mlp.hpp"
#include "bookctl/policies.hpp"

namespace bookctl {

struct SarsaConfig {
    int episodes = 25000;
    double epsilon = 0.10;  // constant exploration probability
    int hidden_dim = 128;
    double learning_rate = 1e-3;
    int eval_every = 100;       // validate the greedy policy every this many episodes
    int eval_realizations = 50;
    std::uint64_t seed = 0;
};

// Per-family network sizes and learning rates; throws for custom families.
SarsaConfig default_sarsa_config(int family);

struct SarsaArtifact {
    std::shared_ptr<QNetwork> net;  // checkpoint with the best validation profit
    SarsaConfig config;
    std::uint64_t instance_hash = 0;
    int best_episode = 0;
    double best_profit = 0.0;
    std::vector<std::pair<int, double>> history;  // (episode, validation mean profit)
};

// Decision-point input: [t/T, w/T entrywise, one-hot request, action bit].
std::vector<double> encode_decision(const InstanceSpec& spec, int t, const std::vector<int>& w,
                                    int j, bool accept);

// On-policy one-step SARSA over decision epochs with epsilon-greedy
// exploration; the horizon bootstraps with the terminal cost source. Keeps
// the checkpoint with the highest validation mean profit.
SarsaArtifact sarsa_train(const InstanceSpec& spec, const TerminalCost& terminal,
                          const SarsaConfig& config);

class SarsaPolicy : public Policy {
  public:
    SarsaPolicy(std::shared_ptr<const QNetwork> net, std::shared_ptr<const InstanceSpec> spec);

    bool decide(const BookingState& state, int j) override;
    std::string name() const override { return "sarsa"; }
    std::unique_ptr<Policy> clone() const override;

  private:
    std::shared_ptr<const QNetwork> net_;
    std::shared_ptr<const InstanceSpec> spec_;
};

void save_sarsa(const SarsaArtifact& artifact, const std::string& path);
SarsaArtifact load_sarsa(const std::string& path);

}  // namespace bookctl
