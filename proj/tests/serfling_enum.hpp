#pragma once

// Exhaustive check of the without-replacement tail bound on binary
// populations: every population of size T, every sample size K, every
// subset, nu = j/10. Returns the number of (population, K, nu) cases where
// the exact probability exceeds the bound.

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gsv/bounds.hpp"

namespace gsv::testing {

struct SerflingScan {
  std::int64_t cases = 0;
  std::int64_t violations = 0;
  double worstRatio = 0.0;  // max exact / bound
};

inline std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline SerflingScan scanSerfling(int maxT) {
  SerflingScan scan;
  for (int T = 2; T <= maxT; ++T) {
    const std::uint32_t full = 1u << T;
    for (std::uint32_t pop = 0; pop < full; ++pop) {
      const int ones = std::popcount(pop);
      // hist[K][s] = number of size-K subsets containing s ones
      std::vector<std::vector<std::int64_t>> hist(T + 1, std::vector<std::int64_t>(T + 1, 0));
      for (std::uint32_t sub = 0; sub < full; ++sub) ++hist[std::popcount(sub)][std::popcount(pop & sub)];
      for (int K = 1; K <= T - 1; ++K) {
        const int N = T - K;
        const std::int64_t subsets = binomial(T, K);
        for (int j = 1; j <= 9; ++j) {
          // rest/N >= sample/K + j/10, cleared of denominators
          std::int64_t hits = 0;
          for (int s = 0; s <= K; ++s) {
            const std::int64_t rest = ones - s;
            if (10LL * K * rest >= 10LL * N * s + 1LL * N * K * j) hits += hist[K][s];
          }
          const long double bound = serflingTail(N, K, j / 10.0);
          const long double exact = static_cast<long double>(hits) / subsets;
          ++scan.cases;
          if (exact > bound) ++scan.violations;
          scan.worstRatio = std::max(scan.worstRatio, static_cast<double>(exact / bound));
        }
      }
    }
  }
  return scan;
}

}  // namespace gsv::testing
