#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gsmp {

// Static striping over task indices. Each task writes only to its own result
// slot, so aggregation order (and therefore output) does not depend on the
// worker count. The first raised exception (by task index) is rethrown on
// the calling thread.
inline void run_parallel(std::size_t tasks, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || tasks <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  if (workers > tasks) workers = static_cast<unsigned>(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < tasks; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gsmp
