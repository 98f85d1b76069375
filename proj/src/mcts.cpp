#include "bookctl/mcts.hpp"

#include <array>
#include <cmath>
#include <unordered_map>

#include "bookctl/simulator.hpp"

namespace bookctl {

namespace {

struct NodeKey {
    int t = 0;
    int j = 0;
    std::vector<int> w;

    bool operator==(const NodeKey& other) const {
        return t == other.t && j == other.j && w == other.w;
    }
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
        std::uint64_t h = fnv1a64_mix(1469598103934665603ULL, static_cast<std::uint64_t>(k.t));
        h = fnv1a64_mix(h, static_cast<std::uint64_t>(k.j));
        for (int v : k.w) h = fnv1a64_mix(h, static_cast<std::uint64_t>(v));
        return static_cast<std::size_t>(h);
    }
};

// Action 0 rejects, action 1 accepts.
struct NodeStats {
    int visits = 0;
    std::array<int, 2> N{0, 0};
    std::array<double, 2> W{0.0, 0.0};
};

}  // namespace

int uct_select(const std::array<int, 2>& N, const std::array<double, 2>& W, int parent_visits,
               double c) {
    if (N[0] == 0) return 0;
    if (N[1] == 0) return 1;
    const double log_parent = std::log(static_cast<double>(parent_visits));
    const double score0 = W[0] / N[0] + c * std::sqrt(log_parent / N[0]);
    const double score1 = W[1] / N[1] + c * std::sqrt(log_parent / N[1]);
    return score1 > score0 ? 1 : 0;
}

bool mcts_decide(const BookingState& state, int j, const InstanceSpec& spec,
                 const ArrivalTable& table, const TerminalCost& terminal, const MctsConfig& config,
                 Policy* base_policy, Rng& rng, MctsTrace* trace) {
    std::unordered_map<NodeKey, NodeStats, NodeKeyHash> tree;

    for (int sim = 0; sim < config.simulations; ++sim) {
        // Pointers into the map stay valid across rehashes.
        std::vector<std::pair<NodeStats*, int>> path;
        std::vector<double> rewards;
        int t = state.t;
        std::vector<int> w = state.w;
        int pending = j;
        bool in_tree = true;
        double tail = 0.0;

        while (true) {
            int action;
            bool expanding = false;
            if (in_tree) {
                NodeStats& node = tree[NodeKey{t, pending, w}];
                action = uct_select(node.N, node.W, node.visits, config.exploration);
                expanding = node.N[action] == 0;
                path.emplace_back(&node, action);
            } else {
                action = base_policy ? (base_policy->decide(BookingState{t, w}, pending) ? 1 : 0)
                                     : (rng.bernoulli(0.5) ? 1 : 0);
            }

            double reward = 0.0;
            if (action == 1) {
                reward = spec.revenues[pending - 1];
                w[pending - 1] += 1;
            }
            if (in_tree) {
                rewards.push_back(reward);
                if (expanding) in_tree = false;
            } else {
                tail += reward;
            }

            // Chance transition: resample periods until the next request.
            int next_request = 0;
            int tnext = t + 1;
            for (; tnext <= spec.T; ++tnext) {
                const Event event = sample_event(table, tnext, rng);
                if (event.is_request()) {
                    next_request = event.j;
                    break;
                }
            }
            if (next_request == 0) {
                tail += terminal(w);
                break;
            }
            t = tnext;
            pending = next_request;
        }

        // Undiscounted backup along the in-tree path.
        double value = tail;
        for (std::size_t i = path.size(); i-- > 0;) {
            value += rewards[i];
            NodeStats* node = path[i].first;
            const int action = path[i].second;
            node->visits += 1;
            node->N[action] += 1;
            node->W[action] += value;
        }
        if (trace) {
            trace->simulations += 1;
            for (const auto& [node, action] : path) {
                if (node->visits != node->N[0] + node->N[1]) trace->conservation_ok = false;
            }
        }
    }

    const NodeStats& root = tree[NodeKey{state.t, j, state.w}];
    if (trace) {
        trace->root_visits = root.visits;
        trace->tree_nodes = tree.size();
    }
    if (root.N[1] != root.N[0]) return root.N[1] > root.N[0];
    if (root.N[1] == 0) return false;
    const double mean0 = root.W[0] / root.N[0];
    const double mean1 = root.W[1] / root.N[1];
    return mean1 > mean0;
}

MctsPolicy::MctsPolicy(MctsConfig config, std::shared_ptr<const InstanceSpec> spec,
                       TerminalCost terminal, std::unique_ptr<Policy> base_policy,
                       std::uint64_t seed)
    : config_(config),
      spec_(std::move(spec)),
      table_(arrival_table(*spec_)),
      terminal_(std::move(terminal)),
      base_(std::move(base_policy)),
      seed_(seed),
      rng_(seed) {}

bool MctsPolicy::decide(const BookingState& state, int j) {
    return mcts_decide(state, j, *spec_, table_, terminal_, config_, base_.get(), rng_);
}

void MctsPolicy::begin_episode(std::uint64_t episode_seed) {
    rng_ = Rng(derive_seed(seed_, episode_seed));
    if (base_) base_->begin_episode(derive_seed(episode_seed, 0xba5e));
}

std::string MctsPolicy::name() const {
    return std::string("mcts-") + (config_.base == MctsBase::random ? "rand" : "sarsa") + "-" +
           std::to_string(config_.simulations);
}

std::unique_ptr<Policy> MctsPolicy::clone() const {
    return std::make_unique<MctsPolicy>(config_, spec_, terminal_,
                                        base_ ? base_->clone() : nullptr, seed_);
}

}  // namespace bookctl
