#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bookctl/instance.hpp"
#include "bookctl/parallel.hpp"

namespace bookctl {

// Labeled terminal states. Labels are routing costs z* (non-negative); the
// outsourcing term is recomputed analytically at prediction time, so the
// model never sees it.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<double> labels;
    std::vector<int> p_index;  // slice of the acceptance-probability schedule
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;

    std::uint64_t instance_hash = 0;
    std::uint64_t seed = 0;
    std::vector<double> p_schedule;
    std::vector<std::string> feature_layout;

    std::size_t size() const { return labels.size(); }
};

// The acceptance probabilities used for data generation, one equal slice of
// episodes per value.
const std::vector<double>& dataset_p_schedule();

// rand-p episodes for each p in the schedule; label = heuristic routing cost
// of the terminal state at K = max(K0, min_vehicles). 80/20 train/test split
// stratified by p. total_size must be divisible by the schedule length.
Dataset generate_dataset(const InstanceSpec& spec, int total_size, std::uint64_t seed,
                         Exec exec = Exec::parallel);

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const std::vector<double>& x) const {
        int id = 0;
        while (nodes[id].feature >= 0) {
            id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
        }
        return nodes[id].value;
    }
};

// Bagged CART regression trees: bootstrap resamples, variance-reduction
// splits over all features, grown until leaves are pure or hold fewer than
// two samples. Prediction is the mean over trees.
struct ForestModel {
    std::vector<RegressionTree> trees;
    int feature_dim = 0;
    std::uint64_t seed = 0;
    std::uint64_t instance_hash = 0;

    double predict(const std::vector<double>& x) const;
};

ForestModel train_forest(const Dataset& data, int tree_count = 100, std::uint64_t seed = 0,
                         Exec exec = Exec::parallel);

// Surrogate operational cost: -(predicted routing cost + analytic
// outsourcing term); exactly 0 for the empty state.
double predict_cost(const ForestModel& model, const std::vector<int>& w, const InstanceSpec& spec);

struct Metrics {
    double mse = 0.0;
    double mae = 0.0;
};

Metrics metrics(const ForestModel& model, const Dataset& data,
                const std::vector<std::size_t>& indices);

// Dataset file: '#'-prefixed provenance block, a header row naming the
// feature layout, then comma-delimited rows.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

// Model file: JSON with a format-version tag and all trees.
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

}  // namespace bookctl
