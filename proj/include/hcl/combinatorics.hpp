#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hcl {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // exact as long as the result fits in 64 bits (desk scale always does)
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

// Advance a strictly increasing k-tuple over [lo, hi] in lexicographic order.
// Returns false when the tuple was the last one.
inline bool next_combination(std::vector<int>& c, int lo, int hi) {
  (void)lo;
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == hi - (k - 1 - i)) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

inline std::vector<int> first_combination(int lo, int k) {
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = lo + i;
  return c;
}

}  // namespace hcl
