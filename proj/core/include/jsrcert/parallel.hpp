#pragma once

// Fan-out helper for independent solver calls. Results are merged by index,
// so output order never depends on scheduling.

#include <atomic>
#include <cstddef>
#include <algorithm>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace jsrcert {

/// Worker count: JSR_CERTIFY_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (0 or unset means auto). Always >= 1.
int thread_count();

/// out[i] = f(i) for i in [0, n). The first exception thrown by any call is
/// rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, F f, int threads = thread_count())
    -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace jsrcert
