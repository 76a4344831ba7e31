#pragma once

// Frequency-grid map kernels. Every per-frequency computation in the library is a
// pure function of (model, omega), so a sweep is an embarrassingly parallel map.
// The serial path is kept as the reference the OpenMP path is tested against.

#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace eprifo {

enum class Exec { serial, parallel };

template <class F>
auto map_index(std::size_t n, F&& f, Exec exec = Exec::parallel)
{
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    return out;
}

template <class F>
auto map_grid(std::span<const double> omegas, F&& f, Exec exec = Exec::parallel)
{
    return map_index(omegas.size(), [&](std::size_t i) { return f(omegas[i]); }, exec);
}

template <class F>
auto map_grid_serial(std::span<const double> omegas, F&& f)
{
    return map_grid(omegas, std::forward<F>(f), Exec::serial);
}

template <class F>
auto map_grid_parallel(std::span<const double> omegas, F&& f)
{
    return map_grid(omegas, std::forward<F>(f), Exec::parallel);
}

}  // namespace eprifo
