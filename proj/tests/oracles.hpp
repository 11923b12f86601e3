#pragma once

// Brute-force reference statistics, written independently of the library
// implementations they check. Kept header-only and test-only.

#include <algorithm>
#include <cmath>
#include <vector>

namespace rtrim::testing {

// Reference quantile: sort, split the fractional rank, blend the two
// bracketing order statistics in long double.
inline double oracle_quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n == 1) return values[0];
  long double rank = static_cast<long double>(p) * static_cast<long double>(n - 1);
  size_t lo = static_cast<size_t>(std::floor(static_cast<double>(rank)));
  size_t hi = static_cast<size_t>(std::ceil(static_cast<double>(rank)));
  if (hi >= n) hi = n - 1;
  long double w = rank - static_cast<long double>(lo);
  long double blended = static_cast<long double>(values[lo]) * (1.0L - w) +
                        static_cast<long double>(values[hi]) * w;
  return static_cast<double>(blended);
}

inline double oracle_min(const std::vector<double>& values) {
  double m = values[0];
  for (double v : values) m = std::min(m, v);
  return m;
}

inline double oracle_length_stat(const std::vector<double>& values) {
  return (oracle_min(values) + oracle_quantile(values, 0.25) +
          oracle_quantile(values, 0.5)) /
         3.0;
}

}  // namespace rtrim::testing
