#include <filesystem>
#include <fstream>
#include <sstream>

#include "bookctl/features.hpp"
#include "bookctl/forest.hpp"
#include "bookctl/simulator.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bookctl;
using namespace testsupport;

namespace {

Dataset tiny_dataset(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    Dataset data;
    data.features = X;
    data.labels = y;
    data.p_index.assign(y.size(), 0);
    for (std::size_t i = 0; i < y.size(); ++i) data.train_indices.push_back(i);
    data.p_schedule = dataset_p_schedule();
    for (std::size_t f = 0; f < X[0].size(); ++f) {
        data.feature_layout.push_back("x" + std::to_string(f));
    }
    return data;
}

}  // namespace

TEST_CASE("dataset generation: sizes, stratification, determinism") {
    const InstanceSpec spec = build_family(4, 13);
    const Dataset data = generate_dataset(spec, 50, 7, Exec::serial);
    CHECK(data.size() == 50);
    CHECK(data.train_indices.size() == 40);
    CHECK(data.test_indices.size() == 10);
    std::vector<int> per_slice(10, 0);
    for (int s : data.p_index) per_slice[s] += 1;
    for (int count : per_slice) CHECK(count == 5);

    const Dataset again = generate_dataset(spec, 50, 7, Exec::serial);
    CHECK(again.labels == data.labels);
    CHECK(again.features == data.features);
    CHECK(again.train_indices == data.train_indices);

    CHECK_THROWS(generate_dataset(spec, 55, 7));
}

TEST_CASE("p = 1.0 slice labels are all-accept terminal costs") {
    const InstanceSpec spec = build_family(4, 13);
    const ArrivalTable table = arrival_table(spec);
    const Dataset data = generate_dataset(spec, 50, 7, Exec::serial);
    for (std::size_t i = 45; i < 50; ++i) {  // the p = 1.0 slice
        REQUIRE(data.p_index[i] == 9);
        Rng rng(derive_seed(7, i));
        std::vector<int> w(spec.n, 0);
        for (int t = 1; t <= spec.T; ++t) {
            const Event event = sample_event(table, t, rng);
            if (event.is_request() && rng.bernoulli(1.0)) w[event.j - 1] += 1;
        }
        const int K = std::max(spec.K0, min_vehicles(w, spec.Q));
        const double expected = solve_cvrp(make_routing_problem(w, spec, K)).cost;
        CHECK(data.labels[i] == doctest::Approx(expected));
        CHECK(data.features[i] == extract(w, spec));
    }
}

TEST_CASE("degenerate forests") {
    const Dataset one = tiny_dataset({{1.0, 2.0}}, {42.0});
    const ForestModel single = train_forest(one, 10, 1, Exec::serial);
    CHECK(single.predict({1.0, 2.0}) == 42.0);
    CHECK(single.predict({-5.0, 9.0}) == 42.0);

    const Dataset constant =
        tiny_dataset({{0.0, 0.0}, {1.0, 0.0}, {2.0, 3.0}}, {7.5, 7.5, 7.5});
    const ForestModel flat = train_forest(constant, 10, 1, Exec::serial);
    CHECK(flat.predict({0.7, 0.1}) == 7.5);

    CHECK_THROWS(train_forest(Dataset{}, 10, 1));
}

TEST_CASE("predictions stay within the label range") {
    Rng rng(21);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 120; ++i) {
        X.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        y.push_back(10.0 * rng.uniform() - 5.0);
    }
    const Dataset data = tiny_dataset(X, y);
    const ForestModel model = train_forest(data, 30, 3, Exec::serial);
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    for (int i = 0; i < 50; ++i) {
        const double pred = model.predict({rng.uniform(), rng.uniform(), rng.uniform()});
        CHECK(pred >= lo - 1e-12);
        CHECK(pred <= hi + 1e-12);
    }
}

TEST_CASE("prediction is invariant to tree order") {
    Rng rng(22);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 60; ++i) {
        X.push_back({rng.uniform(), rng.uniform()});
        y.push_back(X.back()[0] + 3.0 * X.back()[1]);
    }
    const Dataset data = tiny_dataset(X, y);
    ForestModel model = train_forest(data, 16, 5, Exec::serial);
    const std::vector<double> probe = {0.3, 0.6};
    const double before = model.predict(probe);
    std::reverse(model.trees.begin(), model.trees.end());
    CHECK(model.predict(probe) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("duplicating a training row does not hurt its training error") {
    Rng rng(23);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
        X.push_back({rng.uniform() * 10.0, rng.uniform() * 10.0});
        y.push_back(rng.uniform() * 100.0);
    }
    const Dataset base = tiny_dataset(X, y);
    const ForestModel before = train_forest(base, 50, 9, Exec::serial);
    const double err_before = std::abs(before.predict(X[0]) - y[0]);

    auto X2 = X;
    auto y2 = y;
    X2.push_back(X[0]);
    y2.push_back(y[0]);
    const Dataset bigger = tiny_dataset(X2, y2);
    const ForestModel after = train_forest(bigger, 50, 9, Exec::serial);
    const double err_after = std::abs(after.predict(X[0]) - y[0]);
    CHECK(err_after <= err_before + 1e-9);
}

TEST_CASE("metrics of a memorizing model are zero") {
    const Dataset one = tiny_dataset({{1.0, 0.0}}, {5.0});
    const ForestModel model = train_forest(one, 20, 2, Exec::serial);
    Dataset scored = one;
    scored.test_indices = {0};
    const Metrics m = metrics(model, scored, scored.test_indices);
    CHECK(m.mse == 0.0);
    CHECK(m.mae == 0.0);
    CHECK_THROWS(metrics(model, scored, {}));
}

TEST_CASE("surrogate cost applies the analytic outsourcing term") {
    const InstanceSpec spec = build_family(4, 13);
    const Dataset data = generate_dataset(spec, 50, 7, Exec::serial);
    const ForestModel model = train_forest(data, 20, 3, Exec::serial);

    CHECK(predict_cost(model, {0, 0, 0, 0}, spec) == 0.0);

    const std::vector<int> inside{2, 1, 0, 1};  // fits the free fleet
    CHECK(min_vehicles(inside, spec.Q) <= spec.K0);
    CHECK(predict_cost(model, inside, spec) ==
          doctest::Approx(-model.predict(extract(inside, spec))));

    const std::vector<int> crowded{11, 10, 0, 0};  // needs one vehicle beyond K0
    REQUIRE(std::max(spec.K0, min_vehicles(crowded, spec.Q)) == spec.K0 + 1);
    CHECK(predict_cost(model, crowded, spec) ==
          doctest::Approx(-(model.predict(extract(crowded, spec)) + spec.C)));

    // A model trained for one family rejects states from another layout.
    const InstanceSpec other = build_family(10, 13);
    CHECK_THROWS(predict_cost(model, std::vector<int>(other.n, 1), other));
}

TEST_CASE("dataset and model files round trip") {
    namespace fs = std::filesystem;
    const fs::path data_path = fs::temp_directory_path() / "bookctl_dataset_test.csv";
    const fs::path model_path = fs::temp_directory_path() / "bookctl_forest_test.json";

    const InstanceSpec spec = build_family(4, 13);
    const Dataset data = generate_dataset(spec, 50, 11, Exec::serial);
    save_dataset(data, data_path.string());
    const Dataset loaded = load_dataset(data_path.string());
    CHECK(loaded.labels == data.labels);
    CHECK(loaded.features == data.features);
    CHECK(loaded.train_indices == data.train_indices);
    CHECK(loaded.test_indices == data.test_indices);
    CHECK(loaded.instance_hash == data.instance_hash);
    CHECK(loaded.feature_layout == data.feature_layout);

    // Re-saving the reloaded dataset reproduces the file byte for byte.
    const fs::path data_path2 = fs::temp_directory_path() / "bookctl_dataset_test2.csv";
    save_dataset(loaded, data_path2.string());
    std::stringstream first, second;
    first << std::ifstream(data_path).rdbuf();
    second << std::ifstream(data_path2).rdbuf();
    CHECK(first.str() == second.str());
    fs::remove(data_path2);

    const ForestModel model = train_forest(data, 10, 3, Exec::serial);
    save_forest(model, model_path.string());
    const ForestModel reloaded = load_forest(model_path.string());
    CHECK(reloaded.trees.size() == model.trees.size());
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        std::vector<int> w(spec.n);
        for (int& v : w) v = rng.uniform_int(0, 4);
        const auto x = extract(w, spec);
        CHECK(reloaded.predict(x) == model.predict(x));
    }
    fs::remove(data_path);
    fs::remove(model_path);
}
