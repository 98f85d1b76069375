#include "bookctl/features.hpp"

#include <stdexcept>

#include "bookctl/stats.hpp"

namespace bookctl {

int feature_dim(const InstanceSpec& spec) { return spec.n + 17; }

std::vector<std::string> feature_names(const InstanceSpec& spec) {
    std::vector<std::string> names = {"Q", "depot_x", "depot_y"};
    for (int j = 1; j <= spec.n; ++j) names.push_back("w_" + std::to_string(j));
    for (const char* block : {"depot", "pair"}) {
        for (const char* stat : {"min", "max", "mean", "median", "std", "q1", "q3"}) {
            names.push_back(std::string(block) + "_" + stat);
        }
    }
    return names;
}

std::vector<double> extract(const std::vector<int>& w, const InstanceSpec& spec) {
    if (static_cast<int>(w.size()) != spec.n) {
        throw std::invalid_argument("features: state length != n");
    }
    std::vector<double> x;
    x.reserve(feature_dim(spec));
    x.push_back(static_cast<double>(spec.Q));
    x.push_back(spec.depot.x);
    x.push_back(spec.depot.y);
    for (int j = 0; j < spec.n; ++j) x.push_back(static_cast<double>(w[j]));

    std::vector<int> active;
    for (int j = 0; j < spec.n; ++j) {
        if (w[j] > 0) active.push_back(j);
    }
    std::vector<double> depot_dists;
    for (int j : active) depot_dists.push_back(distance(spec.depot, spec.coords[j]));
    std::vector<double> pair_dists;
    for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t b = a + 1; b < active.size(); ++b) {
            pair_dists.push_back(distance(spec.coords[active[a]], spec.coords[active[b]]));
        }
    }
    for (const auto& s : {SummaryStats::of(depot_dists), SummaryStats::of(pair_dists)}) {
        x.push_back(s.min);
        x.push_back(s.max);
        x.push_back(s.mean);
        x.push_back(s.median);
        x.push_back(s.stddev);
        x.push_back(s.q1);
        x.push_back(s.q3);
    }
    return x;
}

}  // namespace bookctl
