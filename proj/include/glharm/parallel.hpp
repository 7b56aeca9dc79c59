#ifndef GLHARM_PARALLEL_HPP
#define GLHARM_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace glharm {

struct Parallelism {
  int threads = 1;
};

/// Sum with a fixed binary-tree order; the result does not depend on how the terms were produced.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/**
 * out[k] = fn(k) for k in [0, count), evaluated on contiguous blocks by
 * `par.threads` threads. If any call throws, the exception of the smallest
 * failing index is rethrown, so failures are reported deterministically.
 */
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, Parallelism par, F&& fn) {
  std::vector<T> out(count);
  const std::size_t threads = std::clamp<std::size_t>(par.threads < 1 ? 1 : par.threads, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_at(threads, count);

  auto run = [&](std::size_t t) {
    const std::size_t begin = count * t / threads, end = count * (t + 1) / threads;
    for (std::size_t k = begin; k < end; ++k) {
      try {
        out[k] = fn(k);
      } catch (...) {
        errors[t] = std::current_exception();
        error_at[t] = k;
        return;
      }
    }
  };

  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run, t);
  }
  const auto first = std::min_element(error_at.begin(), error_at.end());
  if (*first < count) std::rethrow_exception(errors[first - error_at.begin()]);
  return out;
}

}  // namespace glharm

#endif  // GLHARM_PARALLEL_HPP
