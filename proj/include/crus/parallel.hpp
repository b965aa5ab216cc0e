#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace crus {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// identical results; the serial path is kept for testing and benchmarking.
enum class Exec { serial, parallel };

/// Number of OpenMP threads used by parallel kernels (1 without OpenMP).
int max_threads() noexcept;
void set_max_threads(int n) noexcept;

/// Runs fn(i) for i in [0, n). Iterations must only write state owned by i.
/// The first exception thrown by any iteration is rethrown after the loop.
template <class Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace crus
