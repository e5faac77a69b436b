#pragma once

// Qudit graph states, graph-basis deviations and the single-site stabilizer
// test: measure X on vertex i and Z on each neighbor, pass iff
//   x_i + sum_{j in N(i)} z_j = 0 (mod d).
//
// Sign convention: |G(a)> = prod_i Z_i^{a_i} |G> carries g_i with eigenvalue
// w^{-a_i}, so the test on g_i returns residual (-a_i mod d)
// deterministically. The dense oracle pins this in the tests.

#include <map>
#include <vector>

#include <boost/rational.hpp>

#include "gsv/dense.hpp"
#include "gsv/graph.hpp"
#include "gsv/rng.hpp"
#include "gsv/tableau.hpp"

namespace gsv {

/// Graph-basis label a of |G(a)>, entries in [0, d).
class DeviationVector {
 public:
  DeviationVector() = default;
  DeviationVector(std::vector<int> a, int d);
  static DeviationVector zero(int n) { return DeviationVector(std::vector<int>(static_cast<std::size_t>(n), 0), 2); }

  const std::vector<int>& values() const { return a_; }
  int size() const { return static_cast<int>(a_.size()); }
  int operator[](std::size_t i) const { return a_[i]; }
  bool isZero() const;
  bool operator==(const DeviationVector&) const = default;

 private:
  std::vector<int> a_;
};

struct SiteOutcome {
  Vertex vertex = 0;
  Basis basis = Basis::Discard;
  int value = 0;
  bool operator==(const SiteOutcome&) const = default;
};

struct TestOutcome {
  Vertex vertex = 0;  // which g_i was tested
  int residual = 0;
  bool passed = false;
  std::vector<SiteOutcome> rawOutcomes;  // site order
  bool operator==(const TestOutcome&) const = default;
};

/// Measurement sites of the test for g_i, ascending vertex order.
std::vector<std::pair<Vertex, Basis>> testSites(const QuditStabilizerSpec& spec);

/// Residual and pass flag from raw outcomes.
TestOutcome scoreTest(const QuditStabilizerSpec& spec, std::vector<SiteOutcome> raw);

/// Generators exactly {g_i} with phase 0; destabilizers Z_i^{-1}. Prime d only.
StabilizerTableau prepareGraphState(const WeightedHypergraph& graph, int d);

StabilizerTableau applyDeviation(StabilizerTableau state, const DeviationVector& a);
DenseState applyDeviation(DenseState state, const DeviationVector& a);

TestOutcome measureStabilizerTest(StabilizerTableau& state, const QuditStabilizerSpec& spec, Rng& rng);
TestOutcome measureStabilizerTest(DenseState& state, const QuditStabilizerSpec& spec, Rng& rng);

using Rational = boost::rational<long long>;
using ExactDistribution = std::map<std::vector<int>, Rational>;
using RealDistribution = std::map<std::vector<int>, double>;

/// Exact joint distribution of the test's raw outcomes (site order) by
/// branching over every non-deterministic measurement.
ExactDistribution exactTestDistribution(const StabilizerTableau& state, const QuditStabilizerSpec& spec);

/// Builds prod CZ |+_d>^n, applies Z^a, and returns the outcome distribution
/// of the test by full enumeration. Requires d^n <= 2^20.
RealDistribution denseStatevectorOracle(const WeightedHypergraph& graph, int d, const DeviationVector& a,
                                        const QuditStabilizerSpec& spec);

/// Rounds a floating distribution onto the lattice 1/denominator; returns
/// nullopt if any entry is more than `tolerance` away from a lattice point.
std::optional<ExactDistribution> snapToLattice(const RealDistribution& dist, long long denominator,
                                               double tolerance = 1e-9);

/// |<G|psi>|^2 for a tableau state: probability that measuring every g_i
/// yields eigenvalue 1.
Rational graphStateFidelity(const StabilizerTableau& state, const WeightedHypergraph& graph);

}  // namespace gsv
