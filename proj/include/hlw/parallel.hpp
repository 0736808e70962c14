#pragma once

#include <cstdint>
#include <functional>

namespace hlw {

// Worker cap shared by all chunked loops. Defaults to HLW_JOBS or the
// hardware count; the CLI overrides it with --jobs.
int worker_count();
void set_worker_count(int jobs);

// Compensated accumulator for chunk-local sums.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Runs fn(begin, end, chunk_index) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on n and `align` (never on the thread count),
// so reductions that combine per-chunk results in chunk order are bit-stable
// across any --jobs setting.
void parallel_chunks(std::int64_t n, std::int64_t align,
                     const std::function<void(std::int64_t, std::int64_t, int)>& fn);

// Chunk-ordered compensated reduction of term(i) for i in [0, n).
double parallel_sum(std::int64_t n, const std::function<double(std::int64_t)>& term);

}  // namespace hlw
