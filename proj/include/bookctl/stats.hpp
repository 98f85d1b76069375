#pragma once

#include <vector>

namespace bookctl {

// Seven-number summary used by the feature blocks. Quantiles interpolate
// linearly between order statistics; stddev is the population form.
struct SummaryStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;

    // All-zero summary for an empty value set.
    static SummaryStats of(std::vector<double> values);
};

// q in [0,1]; values must be sorted ascending and non-empty.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace bookctl
