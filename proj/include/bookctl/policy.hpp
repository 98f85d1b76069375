#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace bookctl {

// MDP state: the period index (1..T+1) and the accepted-request count per
// location. At most one request is accepted per elapsed period, so
// sum(w) <= t - 1 for every reachable state.
struct BookingState {
    int t = 1;
    std::vector<int> w;
};

// Uniform accept/reject controller interface. decide() answers for a pending
// request j (1..n) in the given state; stochastic policies draw from their
// own stream, reseeded per episode through begin_episode so paired
// evaluations stay reproducible.
class Policy {
  public:
    virtual ~Policy() = default;

    virtual bool decide(const BookingState& state, int j) = 0;

    virtual void begin_episode(std::uint64_t /*episode_seed*/) {}

    virtual std::string name() const = 0;

    // Independent copy for concurrent episode evaluation. Trained artifacts
    // (tables, networks, forests) are shared immutably.
    virtual std::unique_ptr<Policy> clone() const = 0;
};

}  // namespace bookctl
