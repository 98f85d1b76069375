#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bookctl/geometry.hpp"

namespace bookctl {

// A complete booking-problem definition: request locations with revenues,
// per-period arrival probabilities (linear drift), the fleet and the
// capacity derived from the load factor.
struct InstanceSpec {
    int n = 0;                         // request locations
    int T = 0;                         // booking periods
    std::vector<double> revenues;      // p_j, j = 1..n
    double lambda0 = 0.0;              // no-request probability, constant over t
    std::vector<double> lambda_init;   // lambda_j at t = 1
    std::vector<double> lambda_drift;  // signed per-period increment
    std::vector<Point> coords;         // location coordinates
    Point depot;
    int K0 = 0;       // vehicles available at no cost
    double C = 0.0;   // cost per outsourced vehicle
    double LF = 0.0;  // load factor
    int Q = 0;        // vehicle capacity

    std::uint64_t seed = 0;  // coordinate seed, recorded for reproducibility
    int family = 0;          // 4, 10, 15, 50, or 0 for hand-built specs

    // Raw (unnormalized) arrival probability of event j in period t;
    // j = 0 is the no-request event, t in 1..T.
    double lambda(int j, int t) const;

    // Sum of the raw row (lambda_0^t, ..., lambda_n^t).
    double raw_row_sum(int t) const;

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

// Capacity formula: floor of the horizon-total raw arrival mass (including
// the no-request event) divided by K0 * LF. Throws if the result is < 1.
int derive_capacity(const InstanceSpec& spec);

// Builds one of the four standard families (4, 10, 15 or 50 locations).
// Scalar parameters are fixed per family; coordinates and the depot are
// sampled uniformly in the family's square, deterministically from seed.
InstanceSpec build_family(int family, std::uint64_t seed);

// Per-period event distribution in sampling-ready form: row t is the raw
// lambda row divided by its sum, so every row is a probability vector.
struct ArrivalTable {
    int T = 0;
    int n = 0;
    std::vector<double> probs;  // row-major, T rows of (n + 1) entries

    double prob(int t, int j) const { return probs[static_cast<std::size_t>(t - 1) * (n + 1) + j]; }
};

ArrivalTable arrival_table(const InstanceSpec& spec);

// Instance file I/O (key/value JSON with a coordinate list and format tag).
std::string instance_to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const std::string& text);
void save_instance(const InstanceSpec& spec, const std::string& path);
InstanceSpec load_instance(const std::string& path);

// Content hash of the canonical serialization; stamped into every derived
// artifact so mismatched files are rejected early.
std::uint64_t instance_hash(const InstanceSpec& spec);

}  // namespace bookctl
