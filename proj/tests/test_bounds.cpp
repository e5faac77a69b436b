#include <doctest.h>

#include <cmath>

#include "gsv/bounds.hpp"
#include "gsv/rng.hpp"
#include "gsv/verifier.hpp"
#include "serfling_enum.hpp"

using namespace gsv;
using doctest::Approx;

TEST_CASE("N_test frozen values") {
  CHECK(computeNTest(1) == 0);
  CHECK(computeNTest(9) == 2253);
  CHECK(computeNTest(10) == 3598);
  CHECK(computeNTest(16) == 28392);
  CHECK(computeNTest(18) == 47410);
}

TEST_CASE("integer acceptance predicate sits exactly at the threshold") {
  for (int n : {2, 3, 9, 16}) {
    const auto nt = computeNTest(n);
    // smallest passing count: ceil((2n^2 - 1) N_test / 2n)
    const std::int64_t lo = ((2LL * n * n - 1) * nt + 2LL * n - 1) / (2LL * n);
    CHECK(acceptancePredicate(n, lo, nt));
    CHECK_FALSE(acceptancePredicate(n, lo - 1, nt));
    CHECK(acceptancePredicate(n, 1LL * n * nt, nt));
  }
}

TEST_CASE("tail bound frozen values") {
  CHECK(serflingTail(1, 1, 0.5) == Approx(0.8824969025845954).epsilon(1e-14));
  CHECK(std::exp(-2.0 * 0.01 * 50 * 100 / (60.0 * 11.0)) == Approx(serflingTail(50, 10, 0.1)).epsilon(1e-14));
  CHECK_THROWS(serflingTail(0, 1, 0.5));
  CHECK_THROWS(serflingTail(3, 1, 1.0));
}

TEST_CASE("tail bound holds exhaustively for small populations") {
  const auto scan = testing::scanSerfling(8);
  CHECK(scan.cases > 0);
  CHECK(scan.violations == 0);
  CHECK(scan.worstRatio <= 1.0);
}

TEST_CASE("certified bound frozen values") {
  CHECK(certifiedFidelityBound(16, 13, 16.0 * 28392, 28392) == Approx(0.5493060905670013).epsilon(1e-13));
  CHECK(certifiedFidelityBound(9, 13, 20277, 2253) == Approx(0.19876638323022466).epsilon(1e-13));
  CHECK(multiCopyBound(18, 13, 2, 18.0 * 47410, 47410) == Approx(0.19876544433482552).epsilon(1e-12));
  // at the acceptance threshold with two targets
  const double th = (18 - 1.0 / 36) * 47410;
  CHECK(multiCopyBound(18, 13, 2, th, 47410) == Approx(0.08765420302234889).epsilon(1e-10));
  const double scale = 18.0 * 47410 / (18.0 * 47410 - 1);
  CHECK(1.0 - 2.0 * (2 * std::sqrt(13.0) + 1) / 18 * scale == Approx(0.08765420302234883).epsilon(1e-13));
}

TEST_CASE("single-target bound matches the multi-target formula at ntilde = 1") {
  Rng rng(99, 0, StreamPurpose::Auxiliary);
  for (int k = 0; k < 500; ++k) {
    const int n = 2 + static_cast<int>(rng.below(40));
    const double c = rng.uniform(0.5, 300.0);
    const double nt = 1.0 + static_cast<double>(rng.below(100000));
    const double np = rng.uniform(0.0, n * nt);
    CHECK(multiCopyBound(n, c, 1, np, nt) == Approx(certifiedFidelityBound(n, c, np, nt)).epsilon(1e-12));
  }
}

TEST_CASE("bound at the threshold is 1 - (2 sqrt c + 1)/n") {
  for (int n : {9, 10, 16, 33})
    for (double c : {13.0, 16.0, 100.0}) {
      const double nt = static_cast<double>(computeNTest(n));
      const double th = (n - 1.0 / (2.0 * n)) * nt;
      CHECK(certifiedFidelityBound(n, c, th, nt) == Approx(1.0 - (2.0 * std::sqrt(c) + 1.0) / n).epsilon(1e-12));
    }
}

TEST_CASE("confidence chain ordering") {
  for (int n = 2; n <= 40; ++n)
    for (double c : {13.0, 16.0, 32.0, 64.0, 192.0}) {
      const auto ch = totalConfidence(n, c);
      CHECK(ch.groupProduct >= ch.iidLower - 1e-15);
      CHECK(ch.iidLower >= ch.raw - 1e-15);
      CHECK(ch.clamped >= 0.0);
      CHECK(ch.clamped <= 1.0);
    }
  CHECK(totalConfidence(9, 192).raw == Approx(1.0 - std::pow(9.0, -14.0)).epsilon(1e-15));
  CHECK(totalConfidence(9, 192).raw == Approx(0.9999999999999563).epsilon(1e-15));
}

TEST_CASE("group confidence grows with N_test and nu") {
  CHECK(groupConfidence(9, 2253, 1, 0.01) < groupConfidence(9, 4000, 1, 0.01));
  CHECK(groupConfidence(9, 2253, 1, 0.01) < groupConfidence(9, 2253, 1, 0.02));
  CHECK(groupConfidence(9, 2253, 3, 0.0) == 0.0);
  CHECK_THROWS(groupConfidence(9, 2253, 10, 0.1));
}

TEST_CASE("certified count") {
  // perfect record at n = 9: 9 N_test - 2 sqrt(13) N_test, rounded up
  const std::int64_t expect = 9 * 2253 + static_cast<std::int64_t>(std::ceil(-2.0 * std::sqrt(13.0) * 2253));
  CHECK(certifiedCount(9, 2253, 20277, 13) == expect);
  CHECK(certifiedCount(9, 2253, 0, 13) == 0);
  CHECK(certifiedCount(9, 2253, 20276, 13) == expect - 18);
}

TEST_CASE("comparison M") {
  const auto m = comparisonM(10, 192);
  CHECK(m.t == 15.0);
  CHECK(2.0 * std::sqrt(192.0) + 1.0 == Approx(28.712812921102037).epsilon(1e-15));
  CHECK(m.M == Approx(34827657002740.595).epsilon(1e-13));
  for (double c = 64.5; c < 400; c += 3.7) CHECK(comparisonM(12, c).t > 5.0);
  CHECK_THROWS(comparisonM(10, 12.8));
}

namespace {

// Direct binomial sum through lgamma, as an independent check.
double pAccDirect(int n, std::int64_t nTest, double eps) {
  const long double total = static_cast<long double>(n) * nTest;
  long double acc = 0;
  for (std::int64_t k = 0; k <= nTest / (2LL * n); ++k) {
    const long double lc = std::lgamma(total + 1) - std::lgamma(k + 1.0L) - std::lgamma(total - k + 1);
    acc += std::exp(lc + k * std::log(static_cast<long double>(eps)) + (total - k) * std::log1p(-static_cast<long double>(eps)));
  }
  return static_cast<double>(acc);
}

}  // namespace

TEST_CASE("acceptance probability") {
  CHECK(pAcc(2, 4, 0.1) == Approx(0.81310473).epsilon(1e-12));
  CHECK(pAcc(2, 4, 0.0) == 1.0);
  for (int n : {3, 5, 9})
    for (double eps : {0.0005, 0.001, 0.005, 0.01, 0.03}) {
      const auto nt = computeNTest(n);
      const double p = pAcc(n, nt, eps);
      CHECK(p == Approx(pAccDirect(n, nt, eps)).epsilon(1e-9));
      CHECK(p > std::pow(1.0 - eps, static_cast<double>(n * nt)));
      CHECK(pAcc(n, nt, eps * 1.5) <= p);
    }
  CHECK(pAccPrior(1.0, 0.3) == 1.0);
  CHECK(pAccPrior(11.0, 0.1) == Approx(std::pow(0.9, 10)).epsilon(1e-14));
}
