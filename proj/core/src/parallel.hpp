#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nids::detail {

inline std::size_t default_threads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(task) for task in [0, tasks) on up to `threads` workers. Tasks are
/// claimed in a fixed stride per worker, so which worker runs a task never
/// affects its result. The first exception thrown is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t tasks, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(tasks, 1));
  if (threads == 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = w; t < tasks; t += threads) fn(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Splits [0, n) into fixed-size blocks; block boundaries depend only on n.
struct Blocks {
  std::size_t n;
  std::size_t block;

  std::size_t count() const { return (n + block - 1) / block; }
  std::size_t begin(std::size_t b) const { return b * block; }
  std::size_t end(std::size_t b) const { return std::min(n, (b + 1) * block); }
};

/// Pairwise (tree) reduction of partial sums; result is independent of thread
/// scheduling because the combination order is fixed by index.
inline double pairwise_sum(std::vector<double> parts) {
  if (parts.empty()) return 0.0;
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      parts[i] += parts[i + stride];
    }
  }
  return parts[0];
}

}  // namespace nids::detail
