#include <filesystem>

#include "bookctl/simulator.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bookctl;
using namespace testsupport;

TEST_CASE("sample_event follows the arrival row") {
    const InstanceSpec spec = build_family(10, 2);
    const ArrivalTable table = arrival_table(spec);
    Rng rng(42);
    const int draws = 200000;
    int none_t1 = 0, loc9_t2 = 0;
    for (int i = 0; i < draws; ++i) {
        if (!sample_event(table, 1, rng).is_request()) ++none_t1;
        if (sample_event(table, 2, rng).j == 9) ++loc9_t2;
    }
    CHECK(std::abs(none_t1 / double(draws) - 0.10) < 0.005);
    CHECK(std::abs(loc9_t2 / double(draws) - 0.052) < 0.005);
}

TEST_CASE("degenerate arrival row is a point mass") {
    ArrivalTable table;
    table.T = 1;
    table.n = 2;
    table.probs = {1.0, 0.0, 0.0};
    Rng rng(7);
    for (int i = 0; i < 100; ++i) CHECK_FALSE(sample_event(table, 1, rng).is_request());
    CHECK_THROWS(sample_event(table, 2, rng));
    CHECK_THROWS(sample_event(table, 0, rng));
}

TEST_CASE("step transitions") {
    const InstanceSpec spec = build_family(4, 2);
    const BookingState start{1, {0, 0, 0, 0}};

    auto [accepted, reward] = step(start, Event{3}, true, spec);
    CHECK(accepted.t == 2);
    CHECK(accepted.w == std::vector<int>{0, 0, 1, 0});
    CHECK(reward == 12.0);

    auto [after_none, none_reward] = step(start, Event{0}, true, spec);
    CHECK(after_none.w == start.w);
    CHECK(none_reward == 0.0);

    auto [rejected, reject_reward] = step(start, Event{2}, false, spec);
    CHECK(rejected.w == start.w);
    CHECK(reject_reward == 0.0);
}

TEST_CASE("run_episode bookkeeping on a fixed event list") {
    const InstanceSpec spec = build_family(4, 3);
    std::vector<int> events(spec.T, 0);
    events[0] = 1;
    events[4] = 3;
    events[10] = 3;
    events[19] = 4;

    AllRejectPolicy reject;
    const Trajectory none = run_episode(spec, reject, events);
    CHECK(none.revenue == 0.0);
    CHECK(none.final_state.w == std::vector<int>{0, 0, 0, 0});
    CHECK(none.final_state.t == spec.T + 1);

    AllAcceptPolicy accept;
    const Trajectory all = run_episode(spec, accept, events);
    CHECK(all.revenue == 4.0 + 12.0 + 12.0 + 16.0);
    CHECK(all.final_state.w == std::vector<int>{1, 0, 2, 1});

    RandPPolicy always(1.0, 99);
    const Trajectory randp = run_episode(spec, always, events);
    CHECK(randp.revenue == all.revenue);
    CHECK(randp.final_state.w == all.final_state.w);
    CHECK(randp.actions == all.actions);
}

TEST_CASE("trajectory replay reproduces the final state") {
    const InstanceSpec spec = build_family(10, 17);
    const ArrivalTable table = arrival_table(spec);
    RandPPolicy policy(0.5, 5);
    Rng rng(2024);
    const Trajectory traj = run_episode(spec, table, policy, rng);

    BookingState state{1, std::vector<int>(spec.n, 0)};
    int accepted = 0;
    for (int t = 1; t <= spec.T; ++t) {
        auto [next, reward] = step(state, Event{traj.events[t - 1]}, traj.actions[t - 1] == 1, spec);
        state = next;
        accepted += traj.actions[t - 1];
        int total = 0;
        for (int v : state.w) total += v;
        CHECK(total <= state.t - 1);
    }
    CHECK(state.w == traj.final_state.w);
    CHECK(state.t == traj.final_state.t);
    CHECK(accepted <= spec.T);
}

TEST_CASE("episodes are reproducible under a fixed seed") {
    const InstanceSpec spec = build_family(10, 17);
    const ArrivalTable table = arrival_table(spec);
    RandPPolicy a(0.7, 5), b(0.7, 5);
    Rng ra(31), rb(31);
    const Trajectory ta = run_episode(spec, table, a, ra);
    const Trajectory tb = run_episode(spec, table, b, rb);
    CHECK(ta.events == tb.events);
    CHECK(ta.actions == tb.actions);
    CHECK(ta.revenue == tb.revenue);
}

namespace {
class ThrowingPolicy : public Policy {
  public:
    bool decide(const BookingState&, int) override { throw std::runtime_error("boom"); }
    std::string name() const override { return "throwing"; }
    std::unique_ptr<Policy> clone() const override { return std::make_unique<ThrowingPolicy>(); }
};
}  // namespace

TEST_CASE("policy failures propagate out of run_episode") {
    const InstanceSpec spec = build_family(4, 3);
    std::vector<int> events(spec.T, 0);
    events[2] = 1;
    ThrowingPolicy policy;
    CHECK_THROWS_WITH(run_episode(spec, policy, events), "boom");
}

TEST_CASE("total_profit adds the operational cost") {
    Trajectory traj;
    traj.revenue = 50.0;
    CHECK(total_profit(traj, -20.0) == 30.0);
    Trajectory empty;
    CHECK(total_profit(empty, 0.0) == 0.0);
}

TEST_CASE("realization files round trip") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "bookctl_realizations_test.json";
    const InstanceSpec spec = build_family(4, 9);
    const RealizationSet set = gen_realizations(spec, 8, 123);
    CHECK(set.events.size() == 8);
    CHECK(set.instance_hash == instance_hash(spec));

    save_realizations(set, path.string());
    const RealizationSet loaded = load_realizations(path.string());
    CHECK(loaded.events == set.events);
    CHECK(loaded.content_hash() == set.content_hash());

    const RealizationSet again = gen_realizations(spec, 8, 123);
    CHECK(again.events == set.events);
    fs::remove(path);
}
