#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bookctl/instance.hpp"
#include "bookctl/policy.hpp"
#include "bookctl/rng.hpp"

namespace bookctl {

// Period event: j = 0 means no request, j in 1..n identifies the location
// of an incoming request.
struct Event {
    int j = 0;
    bool is_request() const { return j != 0; }
};

// Record of one full episode. actions[t-1] is meaningful only when
// events[t-1] is a request; it is 0 otherwise.
struct Trajectory {
    std::vector<int> events;
    std::vector<int> actions;
    double revenue = 0.0;
    BookingState final_state;
};

Event sample_event(const ArrivalTable& table, int t, Rng& rng);

// Deterministic transition of one period; accept is ignored for no-request
// events. Returns the successor state and the collected reward.
std::pair<BookingState, double> step(const BookingState& state, Event event, bool accept,
                                     const InstanceSpec& spec);

// Replays T periods from w = 0, sampling events from the arrival table.
Trajectory run_episode(const InstanceSpec& spec, const ArrivalTable& table, Policy& policy, Rng& rng);

// Replays a fixed event list (one code per period); fully deterministic for
// deterministic policies.
Trajectory run_episode(const InstanceSpec& spec, Policy& policy, const std::vector<int>& events);

// Episode profit: accumulated revenue plus the (non-positive) operational
// cost of the final state.
double total_profit(const Trajectory& traj, double gamma_value);

// Shared demand realizations so every policy faces identical event lists.
struct RealizationSet {
    std::uint64_t instance_hash = 0;
    std::uint64_t seed = 0;
    int T = 0;
    std::vector<std::vector<int>> events;

    std::uint64_t content_hash() const;
};

RealizationSet gen_realizations(const InstanceSpec& spec, int count, std::uint64_t seed);
void save_realizations(const RealizationSet& set, const std::string& path);
RealizationSet load_realizations(const std::string& path);

}  // namespace bookctl
