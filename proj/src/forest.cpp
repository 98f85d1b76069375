#include "bookctl/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bookctl/features.hpp"
#include "bookctl/routing.hpp"
#include "bookctl/simulator.hpp"
#include "json.hpp"

namespace bookctl {

namespace {

constexpr const char* kDatasetFormat = "bookctl-dataset-v1";
constexpr const char* kForestFormat = "bookctl-forest-v1";

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const std::vector<double>& dataset_p_schedule() {
    static const std::vector<double> schedule = {0.10, 0.25, 0.50, 0.60, 0.70,
                                                 0.80, 0.90, 0.95, 0.99, 1.0};
    return schedule;
}

Dataset generate_dataset(const InstanceSpec& spec, int total_size, std::uint64_t seed, Exec exec) {
    const auto& schedule = dataset_p_schedule();
    const int slices = static_cast<int>(schedule.size());
    if (total_size < slices || total_size % slices != 0) {
        throw std::invalid_argument("dataset: size must be a positive multiple of " +
                                    std::to_string(slices));
    }
    const int per_p = total_size / slices;
    const ArrivalTable table = arrival_table(spec);

    Dataset data;
    data.instance_hash = instance_hash(spec);
    data.seed = seed;
    data.p_schedule = schedule;
    data.feature_layout = feature_names(spec);
    data.features.resize(total_size);
    data.labels.resize(total_size);
    data.p_index.resize(total_size);

    for_each_index(static_cast<std::size_t>(total_size), exec, [&](std::size_t i) {
        const int slice = static_cast<int>(i) / per_p;
        const double p = schedule[slice];
        Rng rng(derive_seed(seed, i));
        std::vector<int> w(spec.n, 0);
        for (int t = 1; t <= spec.T; ++t) {
            const Event event = sample_event(table, t, rng);
            if (event.is_request() && rng.bernoulli(p)) {
                w[event.j - 1] += 1;
            }
        }
        double label = 0.0;
        bool any = false;
        for (int v : w) any = any || v > 0;
        if (any) {
            const int K = std::max(spec.K0, min_vehicles(w, spec.Q));
            label = solve_cvrp(make_routing_problem(w, spec, K)).cost;
        }
        data.features[i] = extract(w, spec);
        data.labels[i] = label;
        data.p_index[i] = slice;
    });

    // 80/20 split, stratified by p so every acceptance level is represented
    // on both sides.
    for (int slice = 0; slice < slices; ++slice) {
        std::vector<std::size_t> order(per_p);
        std::iota(order.begin(), order.end(), static_cast<std::size_t>(slice) * per_p);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(total_size + slice)));
        for (int i = per_p - 1; i > 0; --i) {
            std::swap(order[i], order[rng.uniform_int(0, i)]);
        }
        const int train_count = per_p * 4 / 5;
        for (int i = 0; i < per_p; ++i) {
            (i < train_count ? data.train_indices : data.test_indices).push_back(order[i]);
        }
    }
    std::sort(data.train_indices.begin(), data.train_indices.end());
    std::sort(data.test_indices.begin(), data.test_indices.end());
    return data;
}

namespace {

struct TreeBuilder {
    const std::vector<std::vector<double>>& X;
    const std::vector<double>& y;
    std::vector<TreeNode>& nodes;

    int build(std::vector<std::size_t>& rows) {
        const std::size_t m = rows.size();
        double sum = 0.0;
        for (std::size_t r : rows) sum += y[r];
        const double mean = sum / static_cast<double>(m);

        bool pure = true;
        for (std::size_t r : rows) {
            if (y[r] != y[rows[0]]) {
                pure = false;
                break;
            }
        }
        if (m < 2 || pure) return make_leaf(mean);

        const int dim = static_cast<int>(X[rows[0]].size());
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_sse = std::numeric_limits<double>::infinity();

        std::vector<std::size_t> order(rows);
        for (int f = 0; f < dim; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (X[a][f] != X[b][f]) return X[a][f] < X[b][f];
                return a < b;
            });
            double left_sum = 0.0, left_sq = 0.0;
            double right_sum = 0.0, right_sq = 0.0;
            for (std::size_t r : order) {
                right_sum += y[r];
                right_sq += y[r] * y[r];
            }
            for (std::size_t k = 1; k < m; ++k) {
                const double yv = y[order[k - 1]];
                left_sum += yv;
                left_sq += yv * yv;
                right_sum -= yv;
                right_sq -= yv * yv;
                const double xa = X[order[k - 1]][f];
                const double xb = X[order[k]][f];
                if (xa == xb) continue;
                const double sse = (left_sq - left_sum * left_sum / static_cast<double>(k)) +
                                   (right_sq - right_sum * right_sum / static_cast<double>(m - k));
                if (sse < best_sse) {
                    best_sse = sse;
                    best_feature = f;
                    best_threshold = 0.5 * (xa + xb);
                }
            }
        }
        if (best_feature < 0) return make_leaf(mean);  // all features constant

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (X[r][best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({best_feature, best_threshold, -1, -1, 0.0});
        const int left = build(left_rows);
        const int right = build(right_rows);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }

    int make_leaf(double value) {
        nodes.push_back({-1, 0.0, -1, -1, value});
        return static_cast<int>(nodes.size()) - 1;
    }
};

RegressionTree build_tree(const Dataset& data, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n_train = data.train_indices.size();
    std::vector<std::size_t> rows(n_train);
    for (std::size_t i = 0; i < n_train; ++i) {
        rows[i] = data.train_indices[rng.uniform_int(0, static_cast<int>(n_train) - 1)];
    }
    RegressionTree tree;
    TreeBuilder builder{data.features, data.labels, tree.nodes};
    builder.build(rows);
    return tree;
}

}  // namespace

ForestModel train_forest(const Dataset& data, int tree_count, std::uint64_t seed, Exec exec) {
    if (data.train_indices.empty()) throw std::invalid_argument("forest: empty training split");
    if (tree_count < 1) throw std::invalid_argument("forest: tree count must be >= 1");
    ForestModel model;
    model.feature_dim = static_cast<int>(data.features[data.train_indices[0]].size());
    model.seed = seed;
    model.instance_hash = data.instance_hash;
    model.trees.resize(tree_count);
    for_each_index(static_cast<std::size_t>(tree_count), exec, [&](std::size_t t) {
        model.trees[t] = build_tree(data, derive_seed(seed, t));
    });
    return model;
}

double ForestModel::predict(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != feature_dim) {
        throw std::invalid_argument("forest: feature layout mismatch");
    }
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return sum / static_cast<double>(trees.size());
}

double predict_cost(const ForestModel& model, const std::vector<int>& w, const InstanceSpec& spec) {
    bool empty = true;
    for (int v : w) {
        if (v > 0) {
            empty = false;
            break;
        }
    }
    if (empty) return 0.0;
    const int K = std::max(spec.K0, min_vehicles(w, spec.Q));
    return -(model.predict(extract(w, spec)) + spec.C * (K - spec.K0));
}

Metrics metrics(const ForestModel& model, const Dataset& data,
                const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw std::invalid_argument("forest: empty evaluation split");
    Metrics m;
    for (std::size_t i : indices) {
        const double err = model.predict(data.features[i]) - data.labels[i];
        m.mse += err * err;
        m.mae += std::abs(err);
    }
    m.mse /= static_cast<double>(indices.size());
    m.mae /= static_cast<double>(indices.size());
    return m;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dataset: cannot open " + path + " for writing");
    out << "# " << kDatasetFormat << "\n";
    out << "# instance_hash=" << data.instance_hash << "\n";
    out << "# seed=" << data.seed << "\n";
    out << "# p_schedule=";
    for (std::size_t i = 0; i < data.p_schedule.size(); ++i) {
        out << (i ? "," : "") << format_double(data.p_schedule[i]);
    }
    out << "\n";
    for (std::size_t i = 0; i < data.feature_layout.size(); ++i) {
        out << (i ? "," : "") << data.feature_layout[i];
    }
    out << ",label,p_index,split\n";
    std::vector<char> in_train(data.size(), 0);
    for (std::size_t i : data.train_indices) in_train[i] = 1;
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.features[i]) out << format_double(v) << ",";
        out << format_double(data.labels[i]) << "," << data.p_index[i] << ","
            << (in_train[i] ? "train" : "test") << "\n";
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("dataset: cannot open " + path);
    Dataset data;
    std::string line;
    bool format_ok = false;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(2);
            if (body == kDatasetFormat) format_ok = true;
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            if (key == "instance_hash") data.instance_hash = std::stoull(value);
            if (key == "seed") data.seed = std::stoull(value);
            if (key == "p_schedule") {
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ',')) data.p_schedule.push_back(std::stod(tok));
            }
            continue;
        }
        std::stringstream ss(line);
        std::string tok;
        if (!header_done) {
            std::vector<std::string> columns;
            while (std::getline(ss, tok, ',')) columns.push_back(tok);
            if (columns.size() < 4) throw std::invalid_argument("dataset: malformed header");
            data.feature_layout.assign(columns.begin(), columns.end() - 3);
            header_done = true;
            continue;
        }
        std::vector<std::string> cells;
        while (std::getline(ss, tok, ',')) cells.push_back(tok);
        if (cells.size() != data.feature_layout.size() + 3) {
            throw std::invalid_argument("dataset: malformed row");
        }
        std::vector<double> x(data.feature_layout.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::stod(cells[i]);
        const std::size_t row = data.size();
        data.features.push_back(std::move(x));
        data.labels.push_back(std::stod(cells[cells.size() - 3]));
        data.p_index.push_back(std::stoi(cells[cells.size() - 2]));
        (cells.back() == "train" ? data.train_indices : data.test_indices).push_back(row);
    }
    if (!format_ok) throw std::invalid_argument("dataset: missing format tag");
    return data;
}

void save_forest(const ForestModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = kForestFormat;
    j["feature_dim"] = model.feature_dim;
    j["seed"] = model.seed;
    j["instance_hash"] = model.instance_hash;
    auto trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json t;
        std::vector<int> feature, left, right;
        std::vector<double> threshold, value;
        for (const auto& node : tree.nodes) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            value.push_back(node.value);
        }
        t["feature"] = feature;
        t["threshold"] = threshold;
        t["left"] = left;
        t["right"] = right;
        t["value"] = value;
        trees.push_back(std::move(t));
    }
    j["trees"] = std::move(trees);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("forest: cannot open " + path + " for writing");
    out << j.dump() << "\n";
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("forest: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != kForestFormat) {
        throw std::invalid_argument("forest: unsupported format tag");
    }
    ForestModel model;
    model.feature_dim = j.at("feature_dim").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.instance_hash = j.at("instance_hash").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) {
        RegressionTree tree;
        const auto feature = t.at("feature").get<std::vector<int>>();
        const auto threshold = t.at("threshold").get<std::vector<double>>();
        const auto left = t.at("left").get<std::vector<int>>();
        const auto right = t.at("right").get<std::vector<int>>();
        const auto value = t.at("value").get<std::vector<double>>();
        for (std::size_t i = 0; i < feature.size(); ++i) {
            tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace bookctl
