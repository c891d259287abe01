#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qlab {

namespace detail {
inline std::atomic<unsigned>& job_limit() {
  static std::atomic<unsigned> limit{0};
  return limit;
}
}  // namespace detail

/// Cap on worker threads. 0 means hardware concurrency.
inline void set_max_jobs(unsigned jobs) { detail::job_limit() = jobs; }

inline unsigned max_jobs() {
  unsigned j = detail::job_limit();
  if (j == 0) j = std::max(1u, std::thread::hardware_concurrency());
  return j;
}

/// Runs body(i) for i in [0, n). Work is strided statically over threads, so
/// any result written to slot i is independent of scheduling. The exception
/// from the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t jobs = std::min<std::size_t>(max_jobs(), n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += jobs) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qlab
