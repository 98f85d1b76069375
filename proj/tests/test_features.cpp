#include "bookctl/features.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bookctl;
using namespace testsupport;

TEST_CASE("empty state keeps only the constant block") {
    const InstanceSpec spec = build_family(4, 1);
    const auto x = extract({0, 0, 0, 0}, spec);
    REQUIRE(static_cast<int>(x.size()) == feature_dim(spec));
    CHECK(x.size() == 21);
    CHECK(x[0] == spec.Q);
    CHECK(x[1] == spec.depot.x);
    CHECK(x[2] == spec.depot.y);
    for (std::size_t i = 3; i < x.size(); ++i) CHECK(x[i] == 0.0);
}

TEST_CASE("a single active location fills the depot block only") {
    const InstanceSpec spec =
        make_spec(2, 4, {5.0, 5.0}, 0.2, {0.4, 0.4}, {0.0, 0.0}, {{5.0, 0.0}, {1.0, 1.0}},
                  {0.0, 0.0}, 1, 50.0, 1.0);
    const auto x = extract({3, 0}, spec);
    CHECK(x[3] == 3.0);
    CHECK(x[4] == 0.0);
    const std::vector<double> depot_block(x.begin() + 5, x.begin() + 12);
    CHECK(depot_block == std::vector<double>{5, 5, 5, 5, 0, 5, 5});
    const std::vector<double> pair_block(x.begin() + 12, x.end());
    CHECK(pair_block == std::vector<double>(7, 0.0));
}

TEST_CASE("stats blocks are invariant to relabeling") {
    const InstanceSpec spec = build_family(10, 3);
    InstanceSpec shuffled = spec;
    // Rotate the location labels by one.
    for (int j = 0; j < spec.n; ++j) {
        const int src = (j + 1) % spec.n;
        shuffled.coords[j] = spec.coords[src];
        shuffled.revenues[j] = spec.revenues[src];
        shuffled.lambda_init[j] = spec.lambda_init[src];
        shuffled.lambda_drift[j] = spec.lambda_drift[src];
    }
    std::vector<int> w(spec.n, 0);
    Rng rng(8);
    for (int& v : w) v = rng.uniform_int(0, 3);
    std::vector<int> w_shuffled(spec.n);
    for (int j = 0; j < spec.n; ++j) w_shuffled[j] = w[(j + 1) % spec.n];

    const auto a = extract(w, spec);
    const auto b = extract(w_shuffled, shuffled);
    for (int i = 0; i < 14; ++i) {
        CHECK(a[a.size() - 14 + i] == doctest::Approx(b[b.size() - 14 + i]).epsilon(1e-12));
    }
    for (int j = 0; j < spec.n; ++j) CHECK(b[3 + j] == a[3 + ((j + 1) % spec.n)]);
}

TEST_CASE("coordinate scaling scales the distance blocks only") {
    const InstanceSpec spec = build_family(4, 5);
    InstanceSpec scaled = spec;
    const double s = 2.5;
    for (auto& c : scaled.coords) c = {c.x * s, c.y * s};
    scaled.depot = {spec.depot.x * s, spec.depot.y * s};

    const std::vector<int> w{2, 0, 1, 3};
    const auto a = extract(w, spec);
    const auto b = extract(w, scaled);
    for (int j = 0; j < spec.n; ++j) CHECK(a[3 + j] == b[3 + j]);
    for (std::size_t i = a.size() - 14; i < a.size(); ++i) {
        CHECK(b[i] == doctest::Approx(a[i] * s).epsilon(1e-12));
    }
}

TEST_CASE("stat blocks are internally ordered") {
    const InstanceSpec spec = build_family(15, 9);
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> w(spec.n);
        for (int& v : w) v = rng.uniform_int(0, 2);
        const auto x = extract(w, spec);
        for (int block = 0; block < 2; ++block) {
            const std::size_t base = x.size() - 14 + 7 * block;
            const double min = x[base], max = x[base + 1], median = x[base + 3];
            const double q1 = x[base + 5], q3 = x[base + 6];
            CHECK(min <= q1 + 1e-12);
            CHECK(q1 <= median + 1e-12);
            CHECK(median <= q3 + 1e-12);
            CHECK(q3 <= max + 1e-12);
        }
    }
}
