#include "gsv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gsv {

double serflingTail(std::int64_t N, std::int64_t K, double nu) {
  if (N < 1 || K < 1) throw std::invalid_argument("serflingTail: need N >= 1 and K >= 1");
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("serflingTail: nu must lie in (0, 1)");
  const double n = static_cast<double>(N);
  const double k = static_cast<double>(K);
  return std::exp(-2.0 * nu * nu * n * k * k / ((n + k) * (k + 1.0)));
}

double groupConfidence(int n, std::int64_t nTest, int i, double nu) {
  if (i < 1 || i > n) throw std::out_of_range("groupConfidence: i must lie in [1, n]");
  if (nTest < 1) throw std::invalid_argument("groupConfidence: N_test must be positive");
  if (nu < 0.0) throw std::invalid_argument("groupConfidence: nu must be non-negative");
  const double k = static_cast<double>(nTest);
  const double exponent = 2.0 * nu * nu * k / (1.0 + 1.0 / (2.0 * n - i)) / (1.0 + 1.0 / k);
  return -std::expm1(-exponent);
}

std::int64_t certifiedCount(int n, std::int64_t nTest, std::int64_t nPass, double c) {
  if (nTest <= 0) throw std::invalid_argument("certifiedCount: N_test must be positive");
  // Integer part exact; only the sqrt(c) term is irrational.
  const std::int64_t exact = static_cast<std::int64_t>(n - 2LL * n * n) * nTest + 2LL * n * nPass;
  const double frac = std::ceil(-2.0 * std::sqrt(c) * static_cast<double>(nTest));
  return std::max<std::int64_t>(exact + static_cast<std::int64_t>(frac), 0);
}

ConfidenceChain totalConfidence(int n, double c) {
  if (n < 2) throw std::invalid_argument("totalConfidence: need n >= 2");
  ConfidenceChain out;
  const double t = 5.0 * c / 64.0;
  out.raw = 1.0 - std::pow(static_cast<double>(n), 1.0 - t);
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  const double nn = static_cast<double>(n);
  const auto nTest = static_cast<std::int64_t>(std::ceil(5.0 * nn * nn * nn * nn * std::log(nn) / 32.0));
  const double nu = std::sqrt(c) / (nn * nn);
  out.groupProduct = std::pow(groupConfidence(n, nTest, n, nu), nn);
  out.iidLower = std::pow(1.0 - std::pow(nn, -t), nn);
  return out;
}

ComparisonM comparisonM(int n, double c) {
  if (!(c > 64.0 / 5.0)) throw std::invalid_argument("comparisonM: need c > 64/5");
  if (n < 1) throw std::invalid_argument("comparisonM: need n >= 1");
  ComparisonM out;
  out.t = 5.0 * c / 64.0;
  out.M = std::pow(static_cast<double>(n), out.t) / (2.0 * std::sqrt(c) + 1.0);
  return out;
}

double logPAcc(int n, std::int64_t nTest, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("pAcc: epsilon must lie in [0, 1]");
  if (n < 1 || nTest < 0) throw std::invalid_argument("pAcc: need n >= 1 and N_test >= 0");
  const std::int64_t total = static_cast<std::int64_t>(n) * nTest;
  const std::int64_t kMax = std::min<std::int64_t>(nTest / (2LL * n), total);
  if (epsilon == 0.0 || total == 0) return 0.0;
  if (epsilon == 1.0) return kMax >= total ? 0.0 : -std::numeric_limits<double>::infinity();
  // Binomial terms by ratio recurrence in log space, then log-sum-exp.
  const double logQ = std::log1p(-epsilon);
  const double logRatio = std::log(epsilon) - logQ;
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(kMax + 1));
  double lt = static_cast<double>(total) * logQ;
  for (std::int64_t k = 0; k <= kMax; ++k) {
    logs.push_back(lt);
    lt += std::log(static_cast<double>(total - k) / static_cast<double>(k + 1)) + logRatio;
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - peak);
  return std::min(0.0, peak + std::log(acc));
}

double pAcc(int n, std::int64_t nTest, double epsilon) { return std::exp(logPAcc(n, nTest, epsilon)); }

double pAccPrior(double M, double epsilon) {
  if (!(M >= 1.0)) throw std::invalid_argument("pAccPrior: need M >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("pAccPrior: epsilon must lie in [0, 1]");
  if (M == 1.0) return 1.0;
  if (epsilon == 1.0) return 0.0;
  return std::exp((M - 1.0) * std::log1p(-epsilon));
}

}  // namespace gsv
