#pragma once

// Thin OpenMP wrapper. Every parallel loop in the project goes through
// parallel_for so that threads == 1 gives the plain serial reference
// path and threads != 1 the OpenMP one. Work items must be independent
// and write only to their own slots; combined with per-item derived
// seeds this keeps results bit-identical across thread counts.

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace linksparse {

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// threads == 1 -> serial loop; threads <= 0 -> OpenMP default; else cap
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
#ifdef _OPENMP
    if (threads != 1 && n > 1) {
        if (threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(static_cast<std::size_t>(i));
        } else {
#pragma omp parallel for schedule(dynamic)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)threads;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace linksparse
