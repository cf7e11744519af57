#pragma once

// Thin wrapper over OpenMP worksharing. threads == 1 takes the plain serial
// loop, which doubles as the reference implementation in tests and in the
// benchmark; threads == 0 means "use all hardware threads". Callers must
// make per-iteration work independent and keyed by index (see rng.hpp), so
// the result is identical for every thread count.

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wfl {

inline int resolve_threads(int threads) {
#ifdef _OPENMP
    if (threads <= 0) return omp_get_max_threads();
    return threads;
#else
    (void)threads;
    return 1;
#endif
}

template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
#else
    for (std::int64_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace wfl
