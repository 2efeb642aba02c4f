#include "pyfix/edit_distance.hpp"

#include <algorithm>
#include <numeric>

namespace pyfix {

int token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);
  // Two-row DP keeps memory linear in the shorter dimension's neighbor row.
  std::vector<int> prev(m + 1), curr(m + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (size_t i = 1; i <= n; ++i) {
    curr[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

int token_edit_distance(const TokenStream& a, const TokenStream& b) {
  return token_edit_distance(a.values(), b.values());
}

}  // namespace pyfix
