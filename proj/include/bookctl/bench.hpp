#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bookctl/instance.hpp"
#include "bookctl/parallel.hpp"
#include "bookctl/policy.hpp"
#include "bookctl/simulator.hpp"

namespace bookctl {

// One method entered into a shared-realization evaluation. offline_seconds
// is the preparation time (artifact loading, table/network construction)
// measured before the realization loop.
struct MethodEntry {
    std::string name;
    std::string config;  // human-readable parameter summary
    std::unique_ptr<Policy> policy;
    double offline_seconds = 0.0;
};

struct MethodReport {
    std::string name;
    std::string config;
    std::vector<double> profits;  // per realization
    std::vector<double> gaps;     // percent to best known, per realization
    double mean_profit = 0.0;
    double mean_gap = 0.0;
    double online_seconds = 0.0;
    double offline_seconds = 0.0;
};

struct EvalReport {
    std::uint64_t instance_hash = 0;
    std::uint64_t eval_seed = 0;
    std::uint64_t realization_seed = 0;
    std::uint64_t events_hash = 0;  // paired-demand provenance
    int realization_count = 0;
    std::vector<MethodReport> methods;
};

struct EvalOptions {
    std::uint64_t seed = 0;
    Exec exec = Exec::parallel;
};

// Replays every method on every shared realization; final states are scored
// with the exact routing stack, memoized across methods. Gaps are measured
// against the best profit achieved by any evaluated method per realization.
EvalReport evaluate(const InstanceSpec& spec, std::vector<MethodEntry>& methods,
                    const RealizationSet& realizations, const EvalOptions& opts = {});

// Deterministic result files: a JSON report (profits, gaps, provenance; no
// wall-clock fields) plus a per-realization CSV for box plots.
void export_report(const EvalReport& report, const std::string& results_path,
                   const std::string& table_path);

// Measured wall-clock split, written separately because timings change run
// to run while the result files must be byte-stable under a fixed seed.
void export_timing(const EvalReport& report, const std::string& path);

// Table-style summary (mean profit, online/offline seconds) for stdout.
std::string format_summary(const EvalReport& report);

}  // namespace bookctl
