#include "trady/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace trady {

int max_threads() {
  static const int cached = [] {
    const char* env = std::getenv("TRADY_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v >= 1 ? v : 1;
  }();
  return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t t = static_cast<std::size_t>(max_threads());
  if (t <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(t, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    threads.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace trady
