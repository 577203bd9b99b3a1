#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace mdkit {

int thread_count();
/// Sets the OpenMP team size and the thread count used by FFT plans created
/// afterwards. Values < 1 select the number of available cores.
void set_thread_count(int threads);

namespace detail {
inline constexpr std::size_t kReductionChunk = 4096;

inline double pairwise_total(std::vector<double>& partial) {
  std::size_t n = partial.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) partial[i] += partial[i + half];
    n = half;
  }
  return partial[0];
}
}  // namespace detail

/// Sum of term(i) for i in [0, n). Chunking is fixed and independent of the
/// thread count, and partials are combined in a fixed tree, so the result is
/// bit-identical for any number of threads.
template <class Term>
double ordered_sum(std::size_t n, Term&& term) {
  const std::size_t chunks = (n + detail::kReductionChunk - 1) / detail::kReductionChunk;
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * detail::kReductionChunk;
    const std::size_t end = std::min(n, begin + detail::kReductionChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  return detail::pairwise_total(partial);
}

template <class Term>
double ordered_max(std::size_t n, Term&& term) {
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    best = std::max(best, term(static_cast<std::size_t>(i)));
  }
  return best;
}

}  // namespace mdkit
