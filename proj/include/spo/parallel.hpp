#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace spo {

// Runs fn(i) for i in [0, n). jobs <= 1 is the serial reference path; jobs > 1
// uses OpenMP when compiled in. Work items must be independent and write only
// to their own output slot, so both paths produce bit-identical results.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#if defined(_OPENMP)
    std::exception_ptr err;
    std::mutex err_mu;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

inline int hardware_jobs() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace spo
