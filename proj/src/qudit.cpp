#include "gsv/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace gsv {

DeviationVector::DeviationVector(std::vector<int> a, int d) : a_(std::move(a)) {
  for (auto& v : a_) v = modd(v, d);
}

bool DeviationVector::isZero() const {
  return std::all_of(a_.begin(), a_.end(), [](int v) { return v == 0; });
}

std::vector<std::pair<Vertex, Basis>> testSites(const QuditStabilizerSpec& spec) {
  std::vector<std::pair<Vertex, Basis>> sites;
  sites.emplace_back(spec.vertex, Basis::X);
  for (Vertex j : spec.neighbors) sites.emplace_back(j, Basis::Z);
  std::sort(sites.begin(), sites.end());
  return sites;
}

TestOutcome scoreTest(const QuditStabilizerSpec& spec, std::vector<SiteOutcome> raw) {
  TestOutcome out;
  out.vertex = spec.vertex;
  long long sum = 0;
  for (const auto& s : raw) sum += s.value;
  out.residual = modd(sum, spec.d);
  out.passed = out.residual == 0;
  out.rawOutcomes = std::move(raw);
  return out;
}

StabilizerTableau prepareGraphState(const WeightedHypergraph& graph, int d) {
  const auto specs = buildStabilizers(graph, d);
  const int n = graph.vertexCount();
  std::vector<QuditPauli> gens, destabs;
  for (const auto& s : specs) {
    QuditPauli g = QuditPauli::X(d, n, s.vertex - 1);
    for (Vertex j : s.neighbors) g *= QuditPauli::Z(d, n, j - 1);
    gens.push_back(std::move(g));
    destabs.push_back(QuditPauli::Z(d, n, s.vertex - 1, -1));
  }
  return StabilizerTableau::fromGeneratorsAndDestabilizers(d, gens, destabs);
}

StabilizerTableau applyDeviation(StabilizerTableau state, const DeviationVector& a) {
  if (a.size() != state.qudits()) throw std::invalid_argument("applyDeviation: length mismatch");
  for (int q = 0; q < a.size(); ++q)
    if (a[static_cast<std::size_t>(q)] != 0) state.applyZPower(q, a[static_cast<std::size_t>(q)]);
  return state;
}

DenseState applyDeviation(DenseState state, const DeviationVector& a) {
  if (a.size() != state.qudits()) throw std::invalid_argument("applyDeviation: length mismatch");
  for (int q = 0; q < a.size(); ++q)
    if (a[static_cast<std::size_t>(q)] != 0) state.applyZPower(q, a[static_cast<std::size_t>(q)]);
  return state;
}

namespace {

void checkSpec(const QuditStabilizerSpec& spec, int d, int n) {
  if (spec.d != d) throw std::invalid_argument("stabilizer test: dimension mismatch between state and spec");
  if (spec.vertex < 1 || spec.vertex > n) throw std::invalid_argument("stabilizer test: vertex out of range");
  for (Vertex j : spec.neighbors)
    if (j < 1 || j > n || j == spec.vertex) throw std::invalid_argument("stabilizer test: bad neighbor");
}

}  // namespace

TestOutcome measureStabilizerTest(StabilizerTableau& state, const QuditStabilizerSpec& spec, Rng& rng) {
  checkSpec(spec, state.dim(), state.qudits());
  std::vector<SiteOutcome> raw;
  for (const auto& [v, b] : testSites(spec)) {
    const int m = b == Basis::X ? state.measureX(v - 1, rng) : state.measureZ(v - 1, rng);
    raw.push_back({v, b, m});
  }
  return scoreTest(spec, std::move(raw));
}

TestOutcome measureStabilizerTest(DenseState& state, const QuditStabilizerSpec& spec, Rng& rng) {
  checkSpec(spec, state.dim(), state.qudits());
  std::vector<SiteOutcome> raw;
  for (const auto& [v, b] : testSites(spec)) raw.push_back({v, b, state.measure(v - 1, b, rng)});
  return scoreTest(spec, std::move(raw));
}

ExactDistribution exactTestDistribution(const StabilizerTableau& state, const QuditStabilizerSpec& spec) {
  checkSpec(spec, state.dim(), state.qudits());
  const int d = state.dim();
  const int n = state.qudits();
  const auto sites = testSites(spec);
  ExactDistribution dist;
  std::vector<int> key;
  std::function<void(const StabilizerTableau&, std::size_t, Rational)> branch =
      [&](const StabilizerTableau& s, std::size_t idx, Rational prob) {
        if (idx == sites.size()) {
          dist[key] += prob;
          return;
        }
        const auto [v, b] = sites[idx];
        const QuditPauli p = b == Basis::X ? QuditPauli::X(d, n, v - 1) : QuditPauli::Z(d, n, v - 1);
        if (auto det = s.deterministicOutcome(p)) {
          key.push_back(*det);
          branch(s, idx + 1, prob);
          key.pop_back();
          return;
        }
        for (int m = 0; m < d; ++m) {
          StabilizerTableau next = s;
          next.collapse(p, m);
          key.push_back(m);
          branch(next, idx + 1, prob / d);
          key.pop_back();
        }
      };
  branch(state, 0, Rational(1));
  return dist;
}

RealDistribution denseStatevectorOracle(const WeightedHypergraph& graph, int d, const DeviationVector& a,
                                        const QuditStabilizerSpec& spec) {
  DenseState state = applyDeviation(DenseState::graphState(graph, d), a);
  checkSpec(spec, d, state.qudits());
  std::vector<std::pair<int, Basis>> sites;
  for (const auto& [v, b] : testSites(spec)) sites.emplace_back(v - 1, b);
  RealDistribution dist = state.jointDistribution(sites);
  // Drop round-off dust so the support matches the exact distribution.
  std::erase_if(dist, [](const auto& kv) { return kv.second < 1e-12; });
  return dist;
}

std::optional<ExactDistribution> snapToLattice(const RealDistribution& dist, long long denominator, double tolerance) {
  ExactDistribution out;
  for (const auto& [key, p] : dist) {
    const double scaled = p * static_cast<double>(denominator);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > tolerance * static_cast<double>(denominator)) return std::nullopt;
    if (rounded == 0.0) continue;
    out[key] = Rational(static_cast<long long>(rounded), denominator);
  }
  return out;
}

Rational graphStateFidelity(const StabilizerTableau& state, const WeightedHypergraph& graph) {
  const int d = state.dim();
  const int n = state.qudits();
  if (graph.vertexCount() != n) throw std::invalid_argument("graphStateFidelity: size mismatch");
  // Projector onto |G> is prod_i (1/d) sum_k g_i^k; measuring the commuting
  // g_i in sequence and requiring outcome 0 every time gives <G|rho|G>.
  StabilizerTableau s = state;
  Rational prob(1);
  for (const auto& spec : buildStabilizers(graph, d)) {
    QuditPauli g = QuditPauli::X(d, n, spec.vertex - 1);
    for (Vertex j : spec.neighbors) g *= QuditPauli::Z(d, n, j - 1);
    if (auto det = s.deterministicOutcome(g)) {
      if (*det != 0) return Rational(0);
    } else {
      prob /= d;
      s.collapse(g, 0);
    }
  }
  return prob;
}

}  // namespace gsv
