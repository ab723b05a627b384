#include <vempoly/parallel.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vempoly {

std::size_t thread_budget()
{
  if (const char* env = std::getenv("VEMPOLY_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn)
{
  if (n == 0) return;
  std::size_t nthreads = std::min(thread_budget(), n);
  if (nthreads <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    std::size_t start = t * chunk;
    std::size_t end = std::min(n, start + chunk);
    if (start >= end) break;
    workers.emplace_back([&, start, end] {
      try {
        fn(start, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace vempoly
