#pragma once

#include <cstddef>

namespace bookctl {

// Execution mode for the data-parallel kernels (value-table layers, forest
// training, dataset generation, evaluation cells). Every kernel writes
// disjoint slots and derives per-item RNG streams, so serial and parallel
// runs produce identical results; tests assert this and tools/parallel_bench
// compares their runtimes. Thread count follows OMP_NUM_THREADS.
enum class Exec { serial, parallel };

template <typename Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) {
        fn(i);
    }
}

}  // namespace bookctl
