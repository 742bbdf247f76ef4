#include "mdcc/detail/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mdcc::detail {

namespace {

int default_limit() {
  if (const char* env = std::getenv("MDCC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::atomic<int> g_limit{0};  // 0 = not yet initialized

}  // namespace

int thread_limit() {
  int n = g_limit.load(std::memory_order_relaxed);
  if (n == 0) {
    n = default_limit();
    g_limit.store(n, std::memory_order_relaxed);
  }
  return n;
}

// n <= 0 resets to the environment-derived default.
void set_thread_limit(int n) { g_limit.store(n > 0 ? n : 0, std::memory_order_relaxed); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) {
  const int workers = thread_limit();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count || failed.load(std::memory_order_relaxed)) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mdcc::detail
