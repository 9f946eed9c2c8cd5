#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace whitney::detail {

// Candidate for a deterministic max: larger value wins, ties go to the smaller key.
struct ArgMax {
  double value = -1.0;
  int j = -1;
  int k = -1;

  bool improves(double v, int a, int b) const {
    if (j < 0) return true;
    if (v != value) return v > value;
    return std::pair(a, b) < std::pair(j, k);
  }
  void offer(double v, int a, int b) {
    if (improves(v, a, b)) *this = {v, a, b};
  }
  void merge(const ArgMax& other) {
    if (other.j >= 0) offer(other.value, other.j, other.k);
  }
};

// Runs body(row, acc) for row in [0, rows) and merges the per-thread results in a fixed order.
// Threads are used only for large inputs so that small problems keep their serial cost profile.
template <class Body>
ArgMax parallel_argmax(int rows, std::size_t work, Body body) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned nthreads = (work < (1u << 21) || hw == 1) ? 1u : std::min(hw, 16u);
  if (nthreads == 1) {
    ArgMax acc;
    for (int r = 0; r < rows; ++r) body(r, acc);
    return acc;
  }
  std::vector<ArgMax> partial(nthreads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (int r = static_cast<int>(t); r < rows; r += static_cast<int>(nthreads)) body(r, partial[t]);
    });
  }
  for (auto& th : pool) th.join();
  ArgMax acc;
  for (const auto& p : partial) acc.merge(p);
  return acc;
}

}  // namespace whitney::detail
