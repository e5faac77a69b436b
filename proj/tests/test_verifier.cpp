#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gsv/verifier.hpp"

using namespace gsv;

namespace {

RegisterState allOnes(int n, int d) { return DeviatedRegister{DeviationVector(std::vector<int>(n, 1), d)}; }

ProtocolParams small(int n, int d, std::int64_t nTest, std::uint64_t seed, int nTilde = 1) {
  auto p = ProtocolParams::standard(presets::path(n), d, 13.0, seed, nTilde);
  p.nTest = nTest;
  p.nTotal = 2LL * n * nTest;
  return p;
}

}  // namespace

TEST_CASE("group selection is a disjoint split with consistent roles") {
  const auto p = small(4, 2, 7, 3, 2);
  for (std::uint32_t trial = 0; trial < 20; ++trial) {
    Rng rng(p.seed, trial, StreamPurpose::Verifier);
    const auto sel = sampleGroups(p, rng);
    REQUIRE(sel.groups.size() == 4);
    std::set<RegisterId> used;
    for (int i = 0; i < 4; ++i) {
      CHECK(sel.groups[i].size() == 7);
      CHECK(std::is_sorted(sel.groups[i].begin(), sel.groups[i].end()));
      for (RegisterId id : sel.groups[i]) {
        CHECK(used.insert(id).second);
        CHECK(sel.role(id).kind == RegisterRole::Test);
        CHECK(sel.role(id).group == i + 1);
      }
    }
    CHECK(sel.targets.size() == 2);
    for (RegisterId id : sel.targets) {
      CHECK(used.insert(id).second);
      CHECK(sel.role(id).kind == RegisterRole::Target);
    }
    const auto discards = std::count_if(sel.roles.begin(), sel.roles.end(),
                                        [](const RegisterRole& r) { return r.kind == RegisterRole::Discard; });
    CHECK(discards == p.nTotal - 4 * 7 - 2);
  }
}

TEST_CASE("group selection is uniform") {
  // N_total = 5, two groups of one, one target: each register takes each
  // role with probability 1/5, 1/5, 1/5 and discard 2/5.
  auto p = small(2, 2, 1, 8);
  p.nTotal = 5;
  const int draws = 20000;
  std::vector<std::array<int, 4>> counts(5, std::array<int, 4>{});
  for (int k = 0; k < draws; ++k) {
    Rng rng(p.seed, static_cast<std::uint32_t>(k), StreamPurpose::Verifier);
    const auto sel = sampleGroups(p, rng);
    for (RegisterId id = 1; id <= 5; ++id) {
      const auto& r = sel.role(id);
      ++counts[id - 1][r.kind == RegisterRole::Test ? r.group : r.kind == RegisterRole::Target ? 3 : 0];
    }
  }
  const std::array<double, 4> prob{0.4, 0.2, 0.2, 0.2};
  for (const auto& c : counts) {
    double chi2 = 0.0;
    for (int j = 0; j < 4; ++j) chi2 += std::pow(c[j] - draws * prob[j], 2) / (draws * prob[j]);
    CHECK(chi2 < 16.27);  // 3 degrees of freedom, p = 0.001
  }
}

TEST_CASE("honest prover is accepted with every test passing") {
  for (int d : {2, 3, 4, 5}) {
    const auto p = ProtocolParams::standard(presets::cycle(4), d, 13.0, 21);
    const auto r = runProtocol(p, honest(p.publicParams(0)), 0);
    CHECK(r.verdict.accepted);
    CHECK(r.verdict.nPass == 4 * p.nTest);
    for (auto v : r.transcript.nPassPerGroup) CHECK(v == p.nTest);
    CHECK(r.transcript.tests.size() == static_cast<std::size_t>(4 * p.nTest));
  }
}

TEST_CASE("fully deviated prover fails every test and is rejected") {
  const auto p = small(3, 3, 40, 5);
  const auto a = iidNoise(p.publicParams(0), 1.0, DeviationDistribution::fixed(allOnes(3, 3)));
  const auto r = runProtocol(p, a, 0);
  CHECK(r.verdict.nPass == 0);
  CHECK_FALSE(r.verdict.accepted);
}

TEST_CASE("random deviations pass g_i exactly when a_i = 0") {
  // P(a_i = 0 | a != 0) = (d^{n-1} - 1) / (d^n - 1)
  const auto p = small(3, 3, 2000, 6);
  const auto a = iidNoise(p.publicParams(0), 1.0, DeviationDistribution::uniformNonzero(3, 3));
  const auto r = runProtocol(p, a, 0);
  for (const auto& rec : r.transcript.tests) {
    const auto& dev = std::get<DeviatedRegister>(a.at(rec.reg)).a;
    CHECK(rec.passed() == (dev[static_cast<std::size_t>(rec.group() - 1)] == 0));
  }
  const double rate = static_cast<double>(r.verdict.nPass) / (3.0 * 2000);
  CHECK(std::abs(rate - 8.0 / 26.0) < 4.0 * std::sqrt(8.0 / 26 * 18 / 26 / 6000));
}

TEST_CASE("single bad register costs at most one pass") {
  const auto p = small(4, 2, 30, 9);
  for (std::uint32_t trial = 0; trial < 30; ++trial) {
    const auto a = singleBadRegister(p.publicParams(trial + 1), allOnes(4, 2));
    const auto r = runProtocol(p, a, trial);
    CHECK(r.verdict.nPass >= 4 * 30 - 1);
    CHECK(r.verdict.accepted);
    const double f = ensembleTargetFidelity(p, a, r.transcript.groupMembers);
    const bool tested = r.verdict.nPass == 4 * 30 - 1;
    const double remainder = static_cast<double>(p.nTotal - 4 * 30);
    CHECK(f == doctest::Approx(tested ? 1.0 : 1.0 - 1.0 / remainder));
  }
}

TEST_CASE("ensemble fidelity for several targets") {
  auto p = small(2, 2, 3, 4, 2);
  auto a = honest(p.publicParams(0));
  // groups use 6 of 12 registers; two bad registers left in a remainder of 6
  Rng rng(p.seed, 0, StreamPurpose::Verifier);
  const auto sel = sampleGroups(p, rng);
  int placed = 0;
  for (RegisterId id = 1; id <= p.nTotal && placed < 2; ++id)
    if (sel.role(id).kind != RegisterRole::Test) {
      a.perRegister[id - 1] = allOnes(2, 2);
      ++placed;
    }
  CHECK(ensembleTargetFidelity(p, a, sel.groups) == doctest::Approx(4.0 / 6.0 * 3.0 / 5.0));
}

TEST_CASE("runs replay exactly and differ across trials") {
  const auto p = small(3, 5, 25, 77);
  const auto a = iidNoise(p.publicParams(0), 0.2, DeviationDistribution::uniformNonzero(3, 5));
  const auto r1 = runProtocol(p, a, 4);
  const auto r2 = runProtocol(p, a, 4);
  CHECK(r1.transcript == r2.transcript);
  CHECK(r1.verdict == r2.verdict);
  CHECK(runProtocol(p, a, 5).transcript != r1.transcript);
  CHECK(runProtocol(p, a, 4, false).verdict == r1.verdict);
}

TEST_CASE("verifier holds at most one register of outcomes") {
  const auto p = small(5, 2, 10, 1);
  VerifierSession session(p, 0);
  Rng outcomes(1, 0, StreamPurpose::Auxiliary);
  for (RegisterId id = 1; id <= p.nTotal; ++id) {
    session.beginRegister(id);
    for (Vertex v = 1; v <= 5; ++v) {
      if (session.basisFor(id, v) == Basis::Discard)
        session.recordOutcome(v, std::monostate{});
      else
        session.recordOutcome(v, static_cast<int>(outcomes.below(2)));
    }
    session.endRegister();
  }
  const auto r = session.finish();
  CHECK(session.pendingHighWater() <= 5);
  CHECK(r.transcript.tests.size() == 50);
}

TEST_CASE("session rejects out-of-order input") {
  const auto p = small(3, 2, 4, 1);
  VerifierSession session(p, 0);
  CHECK_THROWS_AS(session.beginRegister(2), ProtocolError);
  session.beginRegister(1);
  CHECK_THROWS_AS(session.finish(), ProtocolError);
}

TEST_CASE("CV protocol in symbolic mode") {
  const auto g = presets::path(3);
  auto p = ProtocolParams::standardCV(g, NoiseModel{}, 0.0, 13.0, 2);
  p.nTest = 30;
  p.nTotal = 180;
  const auto r = runProtocol(p, honest(p.publicParams(0)), 0);
  CHECK(r.verdict.accepted);
  CHECK(r.verdict.nPass == 90);

  const auto bad = singleBadRegister(p.publicParams(0), ShiftedRegister{{0.5, 0.5, 0.5}});
  const auto rb = runProtocol(p, bad, 0);
  CHECK(rb.verdict.nPass >= 89);
}

TEST_CASE("regime flags and strict mode") {
  const auto p = ProtocolParams::standard(presets::path(5), 2, 13.0, 1);
  const auto flags = p.regimeFlags();
  CHECK(std::find(flags.begin(), flags.end(), "n-below-minimum") != flags.end());
  CHECK_NOTHROW(p.validate());
  auto strict = p;
  strict.strict = true;
  CHECK_THROWS(strict.validate());
  CHECK(ProtocolParams::standard(presets::path(9), 2, 13.0, 1).regimeFlags().empty());
  CHECK_FALSE(ProtocolParams::standard(presets::path(9), 2, 16.0, 1).regimeFlags().empty());
}

TEST_CASE("verdict record fields") {
  const auto p = small(3, 2, 10, 1);
  const auto r = runProtocol(p, honest(p.publicParams(0)), 2);
  const auto j = verdictRecord(r.verdict, p.seed, 2);
  for (const char* key : {"accepted", "n", "n_tilde", "c", "n_pass", "n_test", "fidelity_bound", "fidelity_bound_raw",
                          "confidence", "confidence_raw", "certified_count", "in_theorem_regime", "regime_flags", "rng",
                          "seed", "trial"})
    CHECK(j.contains(key));
  CHECK(j["rng"] == "philox4x32-10");
  CHECK(j["trial"] == 2);
}
