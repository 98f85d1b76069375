#include "bookctl/sarsa.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "bookctl/simulator.hpp"
#include "json.hpp"

namespace bookctl {

namespace {
constexpr const char* kPolicyFormat = "bookctl-policy-v1";
}

SarsaConfig default_sarsa_config(int family) {
    SarsaConfig cfg;
    switch (family) {
        case 4:
            cfg.hidden_dim = 128;
            cfg.learning_rate = 1e-3;
            break;
        case 10:
        case 15:
            cfg.hidden_dim = 256;
            cfg.learning_rate = 1e-3;
            break;
        case 50:
            cfg.hidden_dim = 1024;
            cfg.learning_rate = 1e-5;
            break;
        default:
            throw std::invalid_argument("sarsa: no default configuration for family " +
                                        std::to_string(family));
    }
    return cfg;
}

std::vector<double> encode_decision(const InstanceSpec& spec, int t, const std::vector<int>& w,
                                    int j, bool accept) {
    std::vector<double> x(2 * spec.n + 2, 0.0);
    x[0] = static_cast<double>(t) / spec.T;
    for (int i = 0; i < spec.n; ++i) x[1 + i] = static_cast<double>(w[i]) / spec.T;
    x[1 + spec.n + (j - 1)] = 1.0;
    x[2 * spec.n + 1] = accept ? 1.0 : 0.0;
    return x;
}

namespace {

// Greedy action values at a decision point.
std::pair<double, double> action_values(const QNetwork& net, const InstanceSpec& spec, int t,
                                        const std::vector<int>& w, int j) {
    const double reject = net.forward(encode_decision(spec, t, w, j, false));
    const double accept = net.forward(encode_decision(spec, t, w, j, true));
    return {reject, accept};
}

double validation_profit(const QNetwork& net, const InstanceSpec& spec,
                         const std::vector<std::vector<int>>& realizations,
                         const TerminalCost& terminal) {
    double total = 0.0;
    for (const auto& events : realizations) {
        std::vector<int> w(spec.n, 0);
        double revenue = 0.0;
        for (int t = 1; t <= spec.T; ++t) {
            const int j = events[t - 1];
            if (j == 0) continue;
            const auto [q_reject, q_accept] = action_values(net, spec, t, w, j);
            if (q_accept > q_reject) {
                w[j - 1] += 1;
                revenue += spec.revenues[j - 1];
            }
        }
        total += revenue + terminal(w);
    }
    return total / static_cast<double>(realizations.size());
}

}  // namespace

SarsaArtifact sarsa_train(const InstanceSpec& spec, const TerminalCost& terminal,
                          const SarsaConfig& config) {
    if (config.episodes < 1) throw std::invalid_argument("sarsa: episodes must be >= 1");
    const ArrivalTable arrivals = arrival_table(spec);

    QNetwork net(2 * spec.n + 2, config.hidden_dim, config.learning_rate,
                 derive_seed(config.seed, 0x1717));

    std::vector<std::vector<int>> validation(config.eval_realizations);
    {
        Rng rng(derive_seed(config.seed, 0x7a11));
        for (auto& events : validation) {
            events.resize(spec.T);
            for (int t = 1; t <= spec.T; ++t) events[t - 1] = sample_event(arrivals, t, rng).j;
        }
    }

    SarsaArtifact artifact;
    artifact.config = config;
    artifact.instance_hash = instance_hash(spec);
    QNetwork best = net;
    double best_profit = -std::numeric_limits<double>::infinity();
    int best_episode = 0;

    for (int episode = 1; episode <= config.episodes; ++episode) {
        Rng rng(derive_seed(config.seed, 0xe901, static_cast<std::uint64_t>(episode)));
        std::vector<int> w(spec.n, 0);
        bool has_pending = false;
        std::vector<double> pending_input;
        double pending_reward = 0.0;

        for (int t = 1; t <= spec.T; ++t) {
            const Event event = sample_event(arrivals, t, rng);
            if (!event.is_request()) continue;
            const int j = event.j;
            const auto [q_reject, q_accept] = action_values(net, spec, t, w, j);
            bool accept;
            if (rng.uniform() < config.epsilon) {
                accept = rng.bernoulli(0.5);
            } else {
                accept = q_accept > q_reject;
            }
            if (has_pending) {
                const double bootstrap = accept ? q_accept : q_reject;
                net.train_step(pending_input, pending_reward + bootstrap);
            }
            pending_input = encode_decision(spec, t, w, j, accept);
            pending_reward = accept ? spec.revenues[j - 1] : 0.0;
            has_pending = true;
            if (accept) w[j - 1] += 1;
        }
        if (has_pending) {
            net.train_step(pending_input, pending_reward + terminal(w));
        }

        if (episode % config.eval_every == 0 || episode == config.episodes) {
            const double profit = validation_profit(net, spec, validation, terminal);
            artifact.history.emplace_back(episode, profit);
            if (profit > best_profit) {
                best_profit = profit;
                best_episode = episode;
                best = net;
            }
        }
    }

    artifact.net = std::make_shared<QNetwork>(std::move(best));
    artifact.best_profit = best_profit;
    artifact.best_episode = best_episode;
    return artifact;
}

SarsaPolicy::SarsaPolicy(std::shared_ptr<const QNetwork> net,
                         std::shared_ptr<const InstanceSpec> spec)
    : net_(std::move(net)), spec_(std::move(spec)) {}

bool SarsaPolicy::decide(const BookingState& state, int j) {
    const auto [q_reject, q_accept] = action_values(*net_, *spec_, state.t, state.w, j);
    return q_accept > q_reject;
}

std::unique_ptr<Policy> SarsaPolicy::clone() const {
    return std::make_unique<SarsaPolicy>(net_, spec_);
}

void save_sarsa(const SarsaArtifact& artifact, const std::string& path) {
    nlohmann::json j;
    j["format"] = kPolicyFormat;
    j["kind"] = "sarsa";
    j["instance_hash"] = artifact.instance_hash;
    j["episodes"] = artifact.config.episodes;
    j["epsilon"] = artifact.config.epsilon;
    j["hidden_dim"] = artifact.config.hidden_dim;
    j["learning_rate"] = artifact.config.learning_rate;
    j["eval_every"] = artifact.config.eval_every;
    j["eval_realizations"] = artifact.config.eval_realizations;
    j["seed"] = artifact.config.seed;
    j["input_dim"] = artifact.net->input_dim();
    j["best_episode"] = artifact.best_episode;
    j["best_profit"] = artifact.best_profit;
    auto history = nlohmann::json::array();
    for (const auto& [episode, profit] : artifact.history) history.push_back({episode, profit});
    j["history"] = std::move(history);
    j["weights"] = artifact.net->params();
    j["adam_m"] = artifact.net->adam_m();
    j["adam_v"] = artifact.net->adam_v();
    j["adam_steps"] = artifact.net->steps_taken();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("policy: cannot open " + path + " for writing");
    out << j.dump() << "\n";
}

SarsaArtifact load_sarsa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("policy: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != kPolicyFormat || j.value("kind", "") != "sarsa") {
        throw std::invalid_argument("policy: not a sarsa policy file");
    }
    SarsaArtifact artifact;
    artifact.instance_hash = j.at("instance_hash").get<std::uint64_t>();
    artifact.config.episodes = j.at("episodes").get<int>();
    artifact.config.epsilon = j.at("epsilon").get<double>();
    artifact.config.hidden_dim = j.at("hidden_dim").get<int>();
    artifact.config.learning_rate = j.at("learning_rate").get<double>();
    artifact.config.eval_every = j.at("eval_every").get<int>();
    artifact.config.eval_realizations = j.at("eval_realizations").get<int>();
    artifact.config.seed = j.at("seed").get<std::uint64_t>();
    artifact.best_episode = j.at("best_episode").get<int>();
    artifact.best_profit = j.at("best_profit").get<double>();
    for (const auto& h : j.at("history")) {
        artifact.history.emplace_back(h[0].get<int>(), h[1].get<double>());
    }
    auto net = std::make_shared<QNetwork>(j.at("input_dim").get<int>(),
                                          artifact.config.hidden_dim,
                                          artifact.config.learning_rate, 0);
    net->params() = j.at("weights").get<std::vector<double>>();
    net->restore_optimizer(j.at("adam_m").get<std::vector<double>>(),
                           j.at("adam_v").get<std::vector<double>>(),
                           j.at("adam_steps").get<long>());
    artifact.net = std::move(net);
    return artifact;
}

}  // namespace bookctl
