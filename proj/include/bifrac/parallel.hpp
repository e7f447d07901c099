#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace bifrac {

int max_threads();
void set_max_threads(int n);

/// Chunked parallel map over [0, count); each index must be independent.
template <class F>
void parallel_for(long long count, F&& body) {
  const int workers = std::min<long long>(max_threads(), std::max<long long>(count, 1));
  if (workers <= 1 || count < 4096) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const long long chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long long lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (long long i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace bifrac
