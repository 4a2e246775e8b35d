#include "rds/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rds {

namespace {
int g_threads = 0;
}

void set_thread_count(int n) { g_threads = std::max(0, n); }

int thread_count() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {

void parallel_for_impl(std::int64_t n, const std::function<void(std::int64_t)>& body) {
#ifdef _OPENMP
  const int nt = thread_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace detail

namespace kernels {

std::vector<CirclePoint> push_points(const RandomHomeoFamily& fam, const NoiseWindow& window,
                                     const std::vector<CirclePoint>& points, int from, int to,
                                     Exec exec) {
  // touch the span once up front so index errors surface before any work
  if (to > from) {
    (void)window.at(from);
    (void)window.at(to - 1);
  } else if (to < from) {
    (void)window.at(to);
    (void)window.at(from - 1);
  }
  return parallel_map<CirclePoint>(
      static_cast<std::int64_t>(points.size()),
      [&](std::int64_t p) {
        CirclePoint x = points[static_cast<std::size_t>(p)];
        if (to >= from) {
          for (int i = from; i < to; ++i) x = fam.eval(window.at(i), x);
        } else {
          for (int i = from - 1; i >= to; --i) x = fam.eval_inverse(window.at(i), x);
        }
        return x;
      },
      exec);
}

std::vector<std::uint64_t> orbit_histogram(const RandomHomeoFamily& fam, std::uint64_t seed,
                                           int n_chains, int n_burn, std::int64_t steps_per_chain,
                                           int n_bins, Exec exec) {
  const auto& noise = fam.noise();
  auto per_chain = parallel_map<std::vector<std::uint32_t>>(
      n_chains,
      [&](std::int64_t c) {
        std::vector<std::uint32_t> h(static_cast<std::size_t>(n_bins), 0);
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(c));
        CirclePoint x((static_cast<double>(c) + 0.5) / n_chains);
        std::int64_t t = 0;
        for (; t < n_burn; ++t) x = fam.eval(noise.sample(s, t), x);
        for (std::int64_t j = 0; j < steps_per_chain; ++j, ++t) {
          x = fam.eval(noise.sample(s, t), x);
          auto b = static_cast<std::size_t>(x.value() * n_bins);
          if (b >= h.size()) b = h.size() - 1;
          ++h[b];
        }
        return h;
      },
      exec);
  std::vector<std::uint64_t> out(static_cast<std::size_t>(n_bins), 0);
  for (const auto& h : per_chain)
    for (std::size_t b = 0; b < h.size(); ++b) out[b] += h[b];
  return out;
}

}  // namespace kernels
}  // namespace rds
