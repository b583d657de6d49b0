#include "mms/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <thread>

namespace mms {

int thread_count() {
  static const int cached = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    int n = static_cast<int>(hw);
    if (const char* env = std::getenv("MMS_THREADS")) {
      int req = std::atoi(env);
      if (req > 0) n = std::min(n, req);
    }
    return std::max(n, 1);
  }();
  return cached;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t chunks = std::min<std::size_t>(kParallelChunks, n);
  const std::size_t per = (n + chunks - 1) / chunks;
  const int workers = std::min<int>(thread_count(), static_cast<int>(chunks));

  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c)
      fn(c * per, std::min(n, (c + 1) * per));
    return;
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      fn(c * per, std::min(n, (c + 1) * per));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

double parallel_sum(std::size_t n,
                    const std::function<double(std::size_t)>& term) {
  if (n == 0) return 0.0;
  const std::size_t chunks = std::min<std::size_t>(kParallelChunks, n);
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    const std::size_t c = b / per;
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += term(i);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

std::pair<double, std::size_t> parallel_max(
    std::size_t n, const std::function<double(std::size_t)>& term) {
  const double lowest = -std::numeric_limits<double>::infinity();
  if (n == 0) return {lowest, 0};
  const std::size_t chunks = std::min<std::size_t>(kParallelChunks, n);
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<std::pair<double, std::size_t>> partial(
      chunks, {lowest, std::numeric_limits<std::size_t>::max()});
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    const std::size_t c = b / per;
    double best = lowest;
    std::size_t arg = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = b; i < e; ++i) {
      double v = term(i);
      if (v > best) { best = v; arg = i; }
    }
    partial[c] = {best, arg};
  });
  std::pair<double, std::size_t> out{lowest,
                                     std::numeric_limits<std::size_t>::max()};
  for (const auto& p : partial)
    if (p.first > out.first) out = p;
  return out;
}

}  // namespace mms
