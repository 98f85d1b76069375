#include "bookctl/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "bookctl/hash.hpp"
#include "bookctl/routing.hpp"
#include "json.hpp"

namespace bookctl {

namespace {

constexpr const char* kResultsFormat = "bookctl-results-v1";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Identical final states cost the same; share the exact routing solves
// across methods and realizations.
class GammaCache {
  public:
    explicit GammaCache(const InstanceSpec& spec) : spec_(spec) {}

    double gamma(const std::vector<int>& w) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const auto it = cache_.find(w);
            if (it != cache_.end()) return it->second;
        }
        const double value = operational_cost(w, spec_).gamma;
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(w, value).first->second;
    }

  private:
    const InstanceSpec& spec_;
    std::mutex mutex_;
    std::unordered_map<std::vector<int>, double, IntVectorHash> cache_;
};

}  // namespace

EvalReport evaluate(const InstanceSpec& spec, std::vector<MethodEntry>& methods,
                    const RealizationSet& realizations, const EvalOptions& opts) {
    if (methods.empty()) throw std::invalid_argument("bench: no methods to evaluate");
    if (realizations.instance_hash != instance_hash(spec)) {
        throw std::invalid_argument("bench: realization file belongs to a different instance");
    }
    const int R = static_cast<int>(realizations.events.size());
    const int M = static_cast<int>(methods.size());

    EvalReport report;
    report.instance_hash = instance_hash(spec);
    report.eval_seed = opts.seed;
    report.realization_seed = realizations.seed;
    report.events_hash = realizations.content_hash();
    report.realization_count = R;
    report.methods.resize(M);

    std::vector<std::vector<double>> profits(M, std::vector<double>(R, 0.0));
    std::vector<std::vector<double>> cell_seconds(M, std::vector<double>(R, 0.0));
    GammaCache cache(spec);

    for_each_index(static_cast<std::size_t>(M) * R, opts.exec, [&](std::size_t cell) {
        const int m = static_cast<int>(cell / R);
        const int r = static_cast<int>(cell % R);
        const auto start = Clock::now();
        auto policy = methods[m].policy->clone();
        policy->begin_episode(derive_seed(opts.seed, fnv1a64(methods[m].name), r));
        const Trajectory traj = run_episode(spec, *policy, realizations.events[r]);
        profits[m][r] = total_profit(traj, cache.gamma(traj.final_state.w));
        cell_seconds[m][r] = seconds_since(start);
    });

    std::vector<double> best(R, -std::numeric_limits<double>::infinity());
    for (int r = 0; r < R; ++r) {
        for (int m = 0; m < M; ++m) best[r] = std::max(best[r], profits[m][r]);
    }

    for (int m = 0; m < M; ++m) {
        auto& method = report.methods[m];
        method.name = methods[m].name;
        method.config = methods[m].config;
        method.offline_seconds = methods[m].offline_seconds;
        method.profits = profits[m];
        method.gaps.resize(R, 0.0);
        for (int r = 0; r < R; ++r) {
            if (best[r] != 0.0) {
                method.gaps[r] = 100.0 * (best[r] - profits[m][r]) / std::abs(best[r]);
            }
            method.mean_profit += profits[m][r];
            method.mean_gap += method.gaps[r];
            method.online_seconds += cell_seconds[m][r];
        }
        method.mean_profit /= R;
        method.mean_gap /= R;
    }
    return report;
}

void export_report(const EvalReport& report, const std::string& results_path,
                   const std::string& table_path) {
    if (report.methods.empty()) throw std::invalid_argument("bench: refusing to export an empty report");

    nlohmann::json j;
    j["format"] = kResultsFormat;
    j["instance_hash"] = report.instance_hash;
    j["eval_seed"] = report.eval_seed;
    j["realization_seed"] = report.realization_seed;
    j["events_hash"] = report.events_hash;
    j["realization_count"] = report.realization_count;
    auto methods = nlohmann::json::array();
    for (const auto& m : report.methods) {
        nlohmann::json entry;
        entry["name"] = m.name;
        entry["config"] = m.config;
        entry["mean_profit"] = m.mean_profit;
        entry["mean_gap"] = m.mean_gap;
        entry["profits"] = m.profits;
        entry["gaps"] = m.gaps;
        methods.push_back(std::move(entry));
    }
    j["methods"] = std::move(methods);
    std::ofstream out(results_path);
    if (!out) throw std::runtime_error("bench: cannot open " + results_path + " for writing");
    out << j.dump(2) << "\n";

    std::ofstream table(table_path);
    if (!table) throw std::runtime_error("bench: cannot open " + table_path + " for writing");
    table << "method,realization,profit,gap\n";
    char buf[64];
    for (const auto& m : report.methods) {
        for (int r = 0; r < report.realization_count; ++r) {
            table << m.name << "," << r << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", m.profits[r]);
            table << buf << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", m.gaps[r]);
            table << buf << "\n";
        }
    }
}

void export_timing(const EvalReport& report, const std::string& path) {
    nlohmann::json j;
    j["format"] = "bookctl-timing-v1";
    j["instance_hash"] = report.instance_hash;
    auto methods = nlohmann::json::array();
    for (const auto& m : report.methods) {
        methods.push_back({{"name", m.name},
                           {"online_seconds", m.online_seconds},
                           {"offline_seconds", m.offline_seconds},
                           {"total_seconds", m.online_seconds + m.offline_seconds}});
    }
    j["methods"] = std::move(methods);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("bench: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

std::string format_summary(const EvalReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-18s %12s %10s %14s %14s\n", "method", "mean profit",
                  "mean gap%", "online (s)", "offline (s)");
    out << line;
    for (const auto& m : report.methods) {
        std::snprintf(line, sizeof(line), "%-18s %12.2f %10.2f %14.2f %14.2f\n", m.name.c_str(),
                      m.mean_profit, m.mean_gap, m.online_seconds, m.offline_seconds);
        out << line;
    }
    return out.str();
}

}  // namespace bookctl
