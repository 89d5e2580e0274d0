#include "lsv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace lsv {

unsigned default_workers() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t tasks, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
  std::vector<std::exception_ptr> errors(tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) {
      try {
        body(t);
      } catch (...) {
        errors[t] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; !failed.load(std::memory_order_relaxed) && (t = next.fetch_add(1)) < tasks;) {
          try {
            body(t);
          } catch (...) {
            errors[t] = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace lsv
