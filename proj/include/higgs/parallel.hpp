#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace higgs::par {

// Grid sweeps are embarrassingly parallel; reductions must stay reproducible
// regardless of the thread count.  Sums are therefore accumulated per fixed
// 1024-element block (serially inside a block, blocks combined in index
// order), which makes the OpenMP result bit-identical to the serial one.
// Max/argmax reductions combine block results in index order as well, so the
// reported argmax is always the first attaining node.

inline constexpr std::size_t kBlock = 1024;

int jobs();
void set_jobs(int n);

template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
  if (jobs() > 1) {
#pragma omp parallel for schedule(static) num_threads(jobs())
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

template <class F>
double block_sum_serial(std::size_t n, F&& term) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
    partial[b] = s;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

template <class F>
double block_sum(std::size_t n, F&& term) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
  parallel_for(nb, [&](std::size_t b) {
    double s = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
    partial[b] = s;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

struct MaxLoc {
  double value = 0.0;
  std::size_t index = 0;
};

template <class F>
MaxLoc block_max_serial(std::size_t n, F&& term) {
  MaxLoc best{-1.0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double v = term(i);
    if (v > best.value) best = {v, i};
  }
  return best;
}

template <class F>
MaxLoc block_max(std::size_t n, F&& term) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<MaxLoc> partial(nb);
  parallel_for(nb, [&](std::size_t b) {
    MaxLoc best{-1.0, b * kBlock};
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const double v = term(i);
      if (v > best.value) best = {v, i};
    }
    partial[b] = best;
  });
  MaxLoc best{-1.0, 0};
  for (const MaxLoc& m : partial)
    if (m.value > best.value) best = m;
  return best;
}

}  // namespace higgs::par
