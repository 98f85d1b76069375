#include "bookctl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace bookctl {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t m = sorted.size();
    if (m == 1) return sorted[0];
    const double h = q * static_cast<double>(m - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= m) return sorted[m - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats SummaryStats::of(std::vector<double> values) {
    SummaryStats s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    s.min = values.front();
    s.max = values.back();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(m);
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(m));
    s.median = quantile_sorted(values, 0.5);
    s.q1 = quantile_sorted(values, 0.25);
    s.q3 = quantile_sorted(values, 0.75);
    return s;
}

}  // namespace bookctl
