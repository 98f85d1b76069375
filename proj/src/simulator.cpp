#include "bookctl/simulator.hpp"

#include <fstream>
#include <functional>
#include <stdexcept>

#include "bookctl/hash.hpp"
#include "json.hpp"

namespace bookctl {

namespace {
constexpr const char* kRealizationFormat = "bookctl-realizations-v1";
}

Event sample_event(const ArrivalTable& table, int t, Rng& rng) {
    if (t < 1 || t > table.T) {
        throw std::out_of_range("simulator: period " + std::to_string(t) + " outside 1.." +
                                std::to_string(table.T));
    }
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (int j = 0; j <= table.n; ++j) {
        cumulative += table.prob(t, j);
        if (u < cumulative) return Event{j};
    }
    return Event{table.n};  // guards against rounding at u ~ 1
}

std::pair<BookingState, double> step(const BookingState& state, Event event, bool accept,
                                     const InstanceSpec& spec) {
    BookingState next = state;
    next.t = state.t + 1;
    double reward = 0.0;
    if (event.is_request() && accept) {
        next.w[event.j - 1] += 1;
        reward = spec.revenues[event.j - 1];
    }
    return {std::move(next), reward};
}

namespace {

Trajectory replay(const InstanceSpec& spec, Policy& policy,
                  const std::function<Event(int)>& next_event) {
    Trajectory traj;
    traj.events.resize(spec.T, 0);
    traj.actions.resize(spec.T, 0);
    BookingState state{1, std::vector<int>(spec.n, 0)};
    for (int t = 1; t <= spec.T; ++t) {
        const Event event = next_event(t);
        bool accept = false;
        if (event.is_request()) {
            accept = policy.decide(state, event.j);
        }
        auto [next, reward] = step(state, event, accept, spec);
        traj.events[t - 1] = event.j;
        traj.actions[t - 1] = (event.is_request() && accept) ? 1 : 0;
        traj.revenue += reward;
        state = std::move(next);
    }
    traj.final_state = std::move(state);
    return traj;
}

}  // namespace

Trajectory run_episode(const InstanceSpec& spec, const ArrivalTable& table, Policy& policy, Rng& rng) {
    return replay(spec, policy, [&](int t) { return sample_event(table, t, rng); });
}

Trajectory run_episode(const InstanceSpec& spec, Policy& policy, const std::vector<int>& events) {
    if (static_cast<int>(events.size()) != spec.T) {
        throw std::invalid_argument("simulator: event list length != T");
    }
    return replay(spec, policy, [&](int t) { return Event{events[t - 1]}; });
}

double total_profit(const Trajectory& traj, double gamma_value) {
    return traj.revenue + gamma_value;
}

std::uint64_t RealizationSet::content_hash() const {
    std::uint64_t h = fnv1a64_mix(1469598103934665603ULL, seed);
    for (const auto& list : events) {
        for (int code : list) h = fnv1a64_mix(h, static_cast<std::uint64_t>(code));
    }
    return h;
}

RealizationSet gen_realizations(const InstanceSpec& spec, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("simulator: realization count must be >= 1");
    const ArrivalTable table = arrival_table(spec);
    RealizationSet set;
    set.instance_hash = instance_hash(spec);
    set.seed = seed;
    set.T = spec.T;
    set.events.resize(count);
    for (int r = 0; r < count; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        set.events[r].resize(spec.T);
        for (int t = 1; t <= spec.T; ++t) {
            set.events[r][t - 1] = sample_event(table, t, rng).j;
        }
    }
    return set;
}

void save_realizations(const RealizationSet& set, const std::string& path) {
    nlohmann::json j;
    j["format"] = kRealizationFormat;
    j["instance_hash"] = set.instance_hash;
    j["seed"] = set.seed;
    j["T"] = set.T;
    j["count"] = set.events.size();
    j["events"] = set.events;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("simulator: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

RealizationSet load_realizations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("simulator: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != kRealizationFormat) {
        throw std::invalid_argument("simulator: unsupported realization format tag");
    }
    RealizationSet set;
    set.instance_hash = j.at("instance_hash").get<std::uint64_t>();
    set.seed = j.at("seed").get<std::uint64_t>();
    set.T = j.at("T").get<int>();
    set.events = j.at("events").get<std::vector<std::vector<int>>>();
    for (const auto& list : set.events) {
        if (static_cast<int>(list.size()) != set.T) {
            throw std::invalid_argument("simulator: realization length != T");
        }
    }
    return set;
}

}  // namespace bookctl
