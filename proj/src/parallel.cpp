#include "hlw/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hlw {

namespace {

int default_workers() {
  if (const char* env = std::getenv("HLW_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

std::atomic<int> g_workers{0};

}  // namespace

int worker_count() {
  int w = g_workers.load(std::memory_order_relaxed);
  if (w <= 0) {
    w = default_workers();
    g_workers.store(w, std::memory_order_relaxed);
  }
  return w;
}

void set_worker_count(int jobs) { g_workers.store(jobs > 0 ? jobs : 0, std::memory_order_relaxed); }

void parallel_chunks(std::int64_t n, std::int64_t align,
                     const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
  if (n <= 0) return;
  if (align <= 0) align = 1;

  // Fixed chunk geometry: ~4x chunks per worker at the default cap, rounded
  // to `align` items so bitset chunks never share a word.
  std::int64_t chunk = std::max<std::int64_t>(align, (n + 255) / 256);
  chunk = ((chunk + align - 1) / align) * align;
  int n_chunks = static_cast<int>((n + chunk - 1) / chunk);

  int workers = std::min<int>(worker_count(), n_chunks);
  if (workers <= 1) {
    for (int ci = 0; ci < n_chunks; ++ci) {
      std::int64_t b = static_cast<std::int64_t>(ci) * chunk;
      fn(b, std::min(n, b + chunk), ci);
    }
    return;
  }

  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      int ci = next.fetch_add(1, std::memory_order_relaxed);
      if (ci >= n_chunks) return;
      std::int64_t b = static_cast<std::int64_t>(ci) * chunk;
      fn(b, std::min(n, b + chunk), ci);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

double parallel_sum(std::int64_t n, const std::function<double(std::int64_t)>& term) {
  if (n <= 0) return 0.0;
  std::int64_t chunk = std::max<std::int64_t>(1, (n + 255) / 256);
  int n_chunks = static_cast<int>((n + chunk - 1) / chunk);
  std::vector<double> partial(n_chunks, 0.0);
  parallel_chunks(n, 1, [&](std::int64_t b, std::int64_t e, int ci) {
    KahanSum acc;
    for (std::int64_t i = b; i < e; ++i) acc.add(term(i));
    partial[ci] = acc.value();
  });
  KahanSum total;
  for (double v : partial) total.add(v);
  return total.value();
}

}  // namespace hlw
