#pragma once

#include <cstddef>
#include <vector>

namespace miranda {

// Odometer over a rectangular multi-index set; counts[i] nodes along axis i.
// Visits indices in row-major order (last axis fastest) for deterministic output.
template <typename Fn>
void for_each_multi_index(const std::vector<int>& counts, Fn&& fn) {
  const std::size_t dims = counts.size();
  if (dims == 0) {
    std::vector<int> empty;
    fn(empty);
    return;
  }
  for (int c : counts) {
    if (c <= 0) return;
  }
  std::vector<int> idx(dims, 0);
  while (true) {
    fn(idx);
    std::size_t axis = dims;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < counts[axis]) break;
      idx[axis] = 0;
      if (axis == 0) return;
    }
  }
}

// Node k of an endpoint-inclusive uniform grid with `count` nodes on [lo, hi].
inline double grid_node(double lo, double hi, int count, int k) {
  if (count <= 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(count - 1));
}

}  // namespace miranda
