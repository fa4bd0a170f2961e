#include "mutakill/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mutakill {

std::size_t effective_thread_count(std::size_t n_items) {
  if (n_items <= 1) return 1;
  std::size_t threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MUTAKILL_THREADS")) {
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) {
      threads = std::min<std::size_t>(threads, static_cast<std::size_t>(cap));
    }
  }
  return std::min(threads, n_items);
}

void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = effective_thread_count(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(threads - 1);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 1; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    if (begin >= n) break;
    workers.emplace_back(run_chunk, begin, std::min(n, begin + chunk));
  }
  run_chunk(0, std::min(n, chunk));
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mutakill
