#pragma once

// Data-parallel kernels. Each has a serial reference path and an OpenMP path
// selected by Exec; both produce bitwise-identical results because every
// output slot is computed independently and merged by index.

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <vector>

#include "rds/circle.hpp"
#include "rds/family.hpp"
#include "rds/noise.hpp"

namespace rds {

enum class Exec { serial, parallel };

/// Thread count used by Exec::parallel (0 = OpenMP default).
void set_thread_count(int n);
int thread_count();

namespace detail {
void parallel_for_impl(std::int64_t n, const std::function<void(std::int64_t)>& body);
}

/// out[i] = fn(i) for i in [0, n). Exceptions thrown by fn are rethrown on
/// the calling thread (the one with the lowest index wins).
template <typename T, typename Fn>
std::vector<T> parallel_map(std::int64_t n, Fn&& fn, Exec exec) {
  std::vector<T> out(static_cast<std::size_t>(n));
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::mutex mu;
  std::int64_t err_index = n;
  std::exception_ptr err;
  detail::parallel_for_impl(n, [&](std::int64_t i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (i < err_index) {
        err_index = i;
        err = std::current_exception();
      }
    }
  });
  if (err) std::rethrow_exception(err);
  return out;
}

namespace kernels {

/// Pushes each point through the cocycle from window index `from` to `to`:
/// forward maps f_{a_from}, ..., f_{a_(to-1)} when to >= from, inverse maps
/// f^{-1}_{a_(from-1)}, ..., f^{-1}_{a_to} otherwise.
std::vector<CirclePoint> push_points(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                     const std::vector<CirclePoint>& points, int from, int to,
                                     Exec exec);

/// Occupancy counts of `n_chains` independent forward orbits. Chain c starts
/// at (c + 0.5) / n_chains, draws noise from stream derive_seed(seed, c),
/// discards `n_burn` steps and records `steps_per_chain` visits.
std::vector<std::uint64_t> orbit_histogram(const RandomHomeoFamily& fam, std::uint64_t seed,
                                           int n_chains, int n_burn, std::int64_t steps_per_chain,
                                           int n_bins, Exec exec);

}  // namespace kernels
}  // namespace rds
