#pragma once

// Closed-form statistics of the protocol. All logarithms are natural.

#include <cstdint>

namespace gsv {

/// Tail bound for sampling K of N+K items without replacement:
///   Pr[sum_rest >= (N/K) sum_sample + N nu] <= exp(-2 nu^2 N K^2 / ((N+K)(K+1))).
/// Requires N >= 1, K >= 1, 0 < nu < 1.
double serflingTail(std::int64_t N, std::int64_t K, double nu);

/// Probability that the failure count of group i stays close to its
/// remainder, for N_total = 2n N_test. Requires 1 <= i <= n, nu >= 0.
double groupConfidence(int n, std::int64_t nTest, int i, double nu);

/// Lower bound on remaining registers that would pass every stabilizer test,
/// with nu = sqrt(c)/n^2. Requires nTest > 0.
std::int64_t certifiedCount(int n, std::int64_t nTest, std::int64_t nPass, double c);

struct ConfidenceChain {
  double raw = 0.0;        // 1 - n^{1-5c/64}, may be negative
  double clamped = 0.0;    // raw clamped into [0, 1]
  double groupProduct = 0.0;  // q_n^n
  double iidLower = 0.0;      // (1 - n^{-5c/64})^n
};

/// 1 - n^{1-5c/64} together with the chain q_n^n >= (1 - n^{-5c/64})^n >= 1 - n^{1-5c/64}.
/// groupProduct uses the protocol's N_test = ceil(5 n^4 ln n / 32).
ConfidenceChain totalConfidence(int n, double c);

struct ComparisonM {
  double M = 0.0;
  double t = 0.0;  // M = O(n^t)
};

/// Copies an i.i.d.-assuming verifier must test: M = n^{5c/64} / (2 sqrt(c) + 1). Requires c > 64/5.
ComparisonM comparisonM(int n, double c);

/// Probability that an i.i.d. prover with error rate epsilon (bad copies fail
/// every test) is accepted: sum_{k <= floor(N_test/(2n))} C(n N_test, k) (1-eps)^{n N_test - k} eps^k.
double pAcc(int n, std::int64_t nTest, double epsilon);
/// log pAcc, finite where pAcc itself underflows.
double logPAcc(int n, std::int64_t nTest, double epsilon);

/// (1 - epsilon)^{M - 1}. Requires M >= 1.
double pAccPrior(double M, double epsilon);

}  // namespace gsv
