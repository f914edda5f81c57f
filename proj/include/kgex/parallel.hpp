#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kgex {

// Process-wide knobs for the OpenMP kernels. `deterministic` forces the
// sequential reference path everywhere (bitwise-reproducible reductions);
// `max_threads` caps worker counts, 0 means use the OpenMP default.
struct ThreadPolicy {
    static int max_threads;
    static bool deterministic;

    static int threads() {
        if (deterministic) return 1;
#ifdef _OPENMP
        int n = omp_get_max_threads();
#else
        int n = 1;
#endif
        if (max_threads > 0 && max_threads < n) n = max_threads;
        return n;
    }
};

}  // namespace kgex
