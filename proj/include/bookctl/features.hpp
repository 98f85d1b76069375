#pragma once

#include <string>
#include <vector>

#include "bookctl/instance.hpp"

namespace bookctl {

// Fixed-size surrogate input for a terminal state:
//   [Q, depot_x, depot_y, w_1..w_n,
//    depot-distance stats (min,max,mean,median,std,q1,q3) over active
//    locations, pairwise-distance stats (same seven) over active pairs].
// Empty stat sets (no active locations, or fewer than two) are all zeros.
int feature_dim(const InstanceSpec& spec);
std::vector<std::string> feature_names(const InstanceSpec& spec);
std::vector<double> extract(const std::vector<int>& w, const InstanceSpec& spec);

}  // namespace bookctl
