// Times the OpenMP kernels against their serial execution and checks that
// both produce identical output. Thread count follows OMP_NUM_THREADS.
//
//   parallel_bench [--family N] [--rows N] [--trees N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "bookctl/bench.hpp"
#include "bookctl/forest.hpp"
#include "bookctl/mcts.hpp"
#include "bookctl/policies.hpp"
#include "bookctl/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace bookctl;

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double timed(Fn&& fn) {
    const auto start = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const char* kernel, double serial, double parallel, bool identical) {
    std::printf("%-22s %10.3fs %10.3fs %8.2fx   %s\n", kernel, serial, parallel,
                serial / parallel, identical ? "identical output" : "OUTPUT MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int family = 4;
    int rows = 600;
    int trees = 100;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::strcmp(argv[i], "--family") == 0) family = std::atoi(argv[i + 1]);
        if (std::strcmp(argv[i], "--rows") == 0) rows = std::atoi(argv[i + 1]);
        if (std::strcmp(argv[i], "--trees") == 0) trees = std::atoi(argv[i + 1]);
    }
#ifdef _OPENMP
    std::printf("threads: %d (set OMP_NUM_THREADS to change)\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    const auto spec = std::make_shared<const InstanceSpec>(build_family(family, 1));

    Dataset data_serial, data_parallel;
    const double gen_serial =
        timed([&]() { data_serial = generate_dataset(*spec, rows, 7, Exec::serial); });
    const double gen_parallel =
        timed([&]() { data_parallel = generate_dataset(*spec, rows, 7, Exec::parallel); });
    report("dataset generation", gen_serial, gen_parallel,
           data_serial.labels == data_parallel.labels &&
               data_serial.features == data_parallel.features);

    ForestModel forest_serial, forest_parallel;
    const double rf_serial =
        timed([&]() { forest_serial = train_forest(data_serial, trees, 3, Exec::serial); });
    const double rf_parallel =
        timed([&]() { forest_parallel = train_forest(data_serial, trees, 3, Exec::parallel); });
    bool forests_equal = forest_serial.trees.size() == forest_parallel.trees.size();
    for (std::size_t t = 0; forests_equal && t < forest_serial.trees.size(); ++t) {
        forests_equal = forest_serial.trees[t].nodes.size() ==
                        forest_parallel.trees[t].nodes.size();
    }
    report("forest training", rf_serial, rf_parallel, forests_equal);

    const TerminalCost terminal = exact_terminal(spec);
    ValueTable dp_serial, dp_parallel;
    const double vt_serial =
        timed([&]() { dp_serial = dp_solve(*spec, terminal, "exact", {2e7, Exec::serial}); });
    const double vt_parallel =
        timed([&]() { dp_parallel = dp_solve(*spec, terminal, "exact", {2e7, Exec::parallel}); });
    bool tables_equal = dp_serial.state_count() == dp_parallel.state_count();
    for (int t = 1; tables_equal && t < static_cast<int>(dp_serial.layers.size()); ++t) {
        tables_equal = dp_serial.layers[t].values == dp_parallel.layers[t].values;
    }
    report("value-table solve", vt_serial, vt_parallel, tables_equal);

    const RealizationSet reals = gen_realizations(*spec, 50, 5);
    const auto forest = std::make_shared<const ForestModel>(std::move(forest_serial));
    auto make_methods = [&]() {
        std::vector<MethodEntry> methods;
        MctsConfig config;
        config.simulations = 30;
        config.exploration = 100.0;
        methods.push_back({"mcts-rand-30", "",
                           std::make_unique<MctsPolicy>(config, spec,
                                                        surrogate_terminal(forest, spec), nullptr,
                                                        1),
                           0.0});
        methods.push_back({"rand-0.7", "", std::make_unique<RandPPolicy>(0.7, 1), 0.0});
        return methods;
    };
    auto methods_serial = make_methods();
    auto methods_parallel = make_methods();
    EvalReport eval_serial, eval_parallel;
    const double ev_serial = timed(
        [&]() { eval_serial = evaluate(*spec, methods_serial, reals, {9, Exec::serial}); });
    const double ev_parallel = timed(
        [&]() { eval_parallel = evaluate(*spec, methods_parallel, reals, {9, Exec::parallel}); });
    bool evals_equal = true;
    for (std::size_t m = 0; m < eval_serial.methods.size(); ++m) {
        evals_equal = evals_equal &&
                      eval_serial.methods[m].profits == eval_parallel.methods[m].profits;
    }
    report("paired evaluation", ev_serial, ev_parallel, evals_equal);
    return 0;
}
