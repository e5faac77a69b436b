#include <doctest.h>

#include <cmath>

#include "gsv/cv.hpp"

using namespace gsv;
using doctest::Approx;

namespace {

WeightedHypergraph weightedTriangleWithHyperedge() {
  return WeightedHypergraph(4, {{{1, 2}, 0.7}, {{2, 3}, -1.3}, {{1, 3, 4}, 0.5}});
}

struct Stats {
  double mean = 0.0, var = 0.0, passRate = 0.0;
};

Stats sampleResiduals(const CVRegisterModel& model, const CVNullifierSpec& spec, double tau, int count,
                      std::uint64_t seed) {
  Rng rng(seed, 0, StreamPurpose::Auxiliary);
  double s = 0.0, s2 = 0.0;
  int pass = 0;
  for (int k = 0; k < count; ++k) {
    const auto out = runCVStabilizerTest(model, spec, tau, rng);
    s += out.residual;
    s2 += out.residual * out.residual;
    pass += out.passed ? 1 : 0;
  }
  Stats st;
  st.mean = s / count;
  st.var = s2 / count - st.mean * st.mean;
  st.passRate = static_cast<double>(pass) / count;
  return st;
}

}  // namespace

TEST_CASE("squeezed vacuum covariance") {
  const auto st = prepareCVGraphState(WeightedHypergraph(1, {}), 0.1);
  CHECK(st.covariance(0, 0) == Approx(25.0));
  CHECK(st.covariance(1, 1) == Approx(0.01));
  CHECK(st.covariance(0, 1) == 0.0);
  CHECK(st.satisfiesUncertainty());
}

TEST_CASE("CZ covariance keeps every nullifier at the squeezing variance") {
  const WeightedHypergraph g(3, {{{1, 2}, 0.8}, {{2, 3}, 2.0}});
  const double sigma = 0.25;
  const auto model = CVRegisterModel::gaussian(g, NoiseModel{sigma, 0.0});
  REQUIRE(model.gaussianState() != nullptr);
  CHECK(model.gaussianState()->satisfiesUncertainty());
  for (const auto& spec : buildNullifiers(g)) {
    const auto m = gaussianResidualMoments(model, spec);
    CHECK(m.mean == Approx(0.0));
    CHECK(m.variance == Approx(sigma * sigma));
  }
}

TEST_CASE("uncertainty principle across graphs and squeezing") {
  for (double sigma : {0.05, 0.3, 1.0, 3.0}) {
    CHECK(prepareCVGraphState(presets::cycle(5), sigma).satisfiesUncertainty());
    CHECK(prepareCVGraphState(presets::complete(4), sigma).satisfiesUncertainty());
    CHECK(prepareCVGraphState(WeightedHypergraph(3, {{{1, 2}, -3.5}, {{1, 3}, 0.1}}), sigma).satisfiesUncertainty());
  }
}

TEST_CASE("symbolic mode passes ideal nullifiers exactly") {
  for (const auto& g : {presets::path(5), presets::cycle(4), weightedTriangleWithHyperedge()}) {
    const auto model = CVRegisterModel::automatic(g, NoiseModel{});
    CHECK(model.kind() == CVModelKind::Nullifier);
    Rng rng(3, 0, StreamPurpose::Auxiliary);
    for (const auto& spec : buildNullifiers(g))
      for (int k = 0; k < 200; ++k) {
        const auto out = runCVStabilizerTest(model, spec, 0.0, rng);
        CHECK(out.passed);
        CHECK(out.residual == 0.0);
      }
  }
}

TEST_CASE("Weyl shifts move the residual by exactly the shift") {
  const auto g = weightedTriangleWithHyperedge();
  const std::vector<double> s{0.37, -1.25, 2.5, 0.0};
  const auto model = cvDeviationModel(g, s, NoiseModel{});
  Rng rng(4, 0, StreamPurpose::Auxiliary);
  for (const auto& spec : buildNullifiers(g))
    for (int k = 0; k < 100; ++k) {
      const auto out = runCVStabilizerTest(model, spec, 1e-3, rng);
      CHECK(std::abs(out.residual - s[spec.vertex - 1]) <= 1e-9);
      CHECK(out.passed == (std::abs(s[spec.vertex - 1]) <= 1e-3));
    }
}

TEST_CASE("tau = 0 is rejected outside symbolic mode") {
  const auto g = presets::path(3);
  const auto model = CVRegisterModel::gaussian(g, NoiseModel{0.2, 0.0});
  Rng rng(5, 0, StreamPurpose::Auxiliary);
  CHECK_THROWS(runCVStabilizerTest(model, buildNullifiers(g)[0], 0.0, rng));
}

TEST_CASE("Gaussian and nullifier sampling agree on residual moments") {
  const WeightedHypergraph g(4, {{{1, 2}, 1.0}, {{2, 3}, 0.6}, {{2, 4}, -1.1}});
  const NoiseModel noise{0.2, 0.05};
  const auto gm = CVRegisterModel::gaussian(g, noise, {0.1, 0.0, -0.2, 0.0});
  const auto nm = CVRegisterModel::nullifier(g, noise, {0.1, 0.0, -0.2, 0.0});
  for (const auto& spec : buildNullifiers(g)) {
    const auto a = gaussianResidualMoments(gm, spec);
    const auto b = nullifierResidualMoments(nm, spec);
    CHECK(a.mean == Approx(b.mean).epsilon(1e-9));
    CHECK(a.variance == Approx(b.variance).epsilon(1e-9));
  }
}

TEST_CASE("sampled residuals match analytic moments and pass rate") {
  const WeightedHypergraph g(3, {{{1, 2}, 1.0}, {{2, 3}, 0.5}});
  const NoiseModel noise{0.3, 0.1};
  const double tau = 0.35;
  const int count = 100000;
  for (const auto& model : {CVRegisterModel::gaussian(g, noise, {0.0, 0.2, 0.0}),
                            CVRegisterModel::nullifier(g, noise, {0.0, 0.2, 0.0})}) {
    for (const auto& spec : buildNullifiers(g)) {
      const auto m = model.kind() == CVModelKind::Gaussian ? gaussianResidualMoments(model, spec)
                                                           : nullifierResidualMoments(model, spec);
      const auto st = sampleResiduals(model, spec, tau, count, 11 + spec.vertex);
      const double p = gaussianPassProbability(m, tau);
      CHECK(std::abs(st.mean - m.mean) <= 5.0 * std::sqrt(m.variance / count));
      CHECK(st.var == Approx(m.variance).epsilon(0.03));
      CHECK(std::abs(st.passRate - p) <= 4.0 * std::sqrt(p * (1 - p) / count));
    }
  }
}

TEST_CASE("pass probability closed forms") {
  CHECK(gaussianPassProbability({0.0, 0.01}, 0.5) == Approx(0.9999994266968562).epsilon(1e-13));
  CHECK(gaussianPassProbability({0.0, 1.0}, 1.0) == Approx(0.6826894921370859).epsilon(1e-13));
  CHECK(gaussianPassProbability({0.3, 0.0}, 0.5) == 1.0);
  CHECK(gaussianPassProbability({0.6, 0.0}, 0.5) == 0.0);
}

TEST_CASE("site order is ascending and covers p on the centre, x elsewhere") {
  const auto g = weightedTriangleWithHyperedge();
  for (const auto& spec : buildNullifiers(g)) {
    const auto sites = testSites(spec);
    for (std::size_t k = 1; k < sites.size(); ++k) CHECK(sites[k - 1].first < sites[k].first);
    for (const auto& [v, b] : sites) CHECK(b == (v == spec.vertex ? Basis::Phase : Basis::Amplitude));
  }
}
