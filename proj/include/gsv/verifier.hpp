#pragma once

// The verifier's side of the protocol: sample n disjoint test groups and the
// target(s) from one uniform permutation, test every register of group i with
// g_i, count passes, and accept iff N_pass >= (n - 1/(2n)) N_test.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gsv/adversary.hpp"
#include "gsv/cv.hpp"
#include "gsv/device.hpp"
#include "gsv/graph.hpp"
#include "gsv/qudit.hpp"
#include "gsv/rng.hpp"

namespace gsv {

/// ceil(5 n^4 ln n / 32). n = 1 gives 0.
std::int64_t computeNTest(int n);

/// 2n N_pass >= (2n^2 - 1) N_test, evaluated in integers.
bool acceptancePredicate(int n, std::int64_t nPass, std::int64_t nTest);

/// 1 - 2 sqrt(c)/n - 2n (1 - N_pass/(n N_test)).
double certifiedFidelityBound(int n, double c, double nPass, double nTest);
/// 1 - (2 sqrt(c) + 2n^2 - 2n N_pass/N_test) ntilde N_test / (n N_test - (ntilde - 1)).
double multiCopyBound(int n, double c, int nTilde, double nPass, double nTest);

struct ProtocolParams {
  WeightedHypergraph graph;
  bool cv = false;
  int d = 2;  // ignored in CV mode
  double c = 13.0;
  std::int64_t nTest = 0;
  std::int64_t nTotal = 0;
  int nTilde = 1;
  std::uint64_t seed = 0;
  NoiseModel noise;  // CV only
  double tau = 0.0;  // CV only
  std::optional<CVModelKind> cvModel;
  bool strict = false;

  int n() const { return graph.vertexCount(); }

  /// N_test = computeNTest(n), N_total = 2n N_test.
  static ProtocolParams standard(WeightedHypergraph graph, int d, double c, std::uint64_t seed, int nTilde = 1);
  static ProtocolParams standardCV(WeightedHypergraph graph, const NoiseModel& noise, double tau, double c,
                                   std::uint64_t seed, int nTilde = 1);

  /// Departures from the theorem's hypotheses; empty inside the regime.
  std::vector<std::string> regimeFlags() const;
  /// Throws std::invalid_argument for unusable parameters, and for regime
  /// departures when strict is set.
  void validate() const;

  PublicParams publicParams(std::uint64_t correlationSeed) const;
};

struct RegisterRole {
  enum Kind : std::uint8_t { Discard, Test, Target };
  Kind kind = Discard;
  int group = 0;  // 1-based stabilizer index for Test
};

struct GroupSelection {
  std::vector<std::vector<RegisterId>> groups;  // groups[i-1] = Pi^(i), ascending
  std::vector<RegisterId> targets;             // ascending
  std::vector<RegisterRole> roles;             // index id - 1

  const RegisterRole& role(RegisterId id) const { return roles.at(static_cast<std::size_t>(id - 1)); }
};

/// One uniform permutation of [1..N_total] split into n groups of N_test,
/// then ntilde targets. Requires N_total >= n N_test + ntilde.
GroupSelection sampleGroups(const ProtocolParams& params, Rng& rng);

struct TestRecord {
  RegisterId reg = 0;
  std::variant<TestOutcome, CVTestOutcome> outcome;

  int group() const;
  bool passed() const;
  bool operator==(const TestRecord&) const = default;
};

struct Verdict {
  bool accepted = false;
  int n = 0;
  int nTilde = 1;
  double c = 0.0;
  std::int64_t nPass = 0;
  std::int64_t nTest = 0;
  double fidelityBound = 0.0;     // min(raw, 1)
  double fidelityBoundRaw = 0.0;
  double confidence = 0.0;        // clamped to [0, 1]
  double confidenceRaw = 0.0;
  std::int64_t certifiedCount = 0;
  std::vector<std::string> regimeFlags;

  bool inTheoremRegime() const { return regimeFlags.empty(); }
  bool operator==(const Verdict&) const = default;
};

Verdict computeVerdict(const ProtocolParams& params, std::int64_t nPass);

struct Transcript {
  std::uint64_t seed = 0;
  std::uint32_t trial = 0;
  int n = 0;
  std::int64_t nTest = 0;
  std::int64_t nTotal = 0;
  int nTilde = 1;
  std::vector<std::vector<RegisterId>> groupMembers;
  std::vector<TestRecord> tests;  // register order; empty when outcomes are not kept
  std::vector<std::int64_t> nPassPerGroup;
  std::vector<RegisterId> targets;

  bool operator==(const Transcript&) const = default;
};

struct ProtocolResult {
  Transcript transcript;
  Verdict verdict;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Verifier state machine fed one site at a time. Holds at most one
/// register's outcomes; everything else is running counts.
class VerifierSession {
 public:
  VerifierSession(const ProtocolParams& params, std::uint32_t trial, bool keepOutcomes = true);

  const GroupSelection& selection() const { return selection_; }
  Basis basisFor(RegisterId id, Vertex site) const;

  void beginRegister(RegisterId id);
  void recordOutcome(Vertex site, const Outcome& value);
  void endRegister();
  ProtocolResult finish();

  RegisterId nextRegister() const { return current_ + (open_ ? 0 : 1); }
  std::size_t pendingHighWater() const { return highWater_; }

 private:
  const ProtocolParams& params_;
  bool keep_;
  GroupSelection selection_;
  std::vector<QuditStabilizerSpec> quditSpecs_;
  std::vector<CVNullifierSpec> cvSpecs_;
  std::vector<std::vector<Basis>> plans_;  // per group, per site
  Transcript transcript_;

  RegisterId current_ = 0;
  Vertex site_ = 0;
  bool open_ = false;
  std::vector<SiteOutcome> pendingQudit_;
  std::vector<CVSiteOutcome> pendingCV_;
  std::size_t highWater_ = 0;
};

/// Streams every register through a ProverDevice and a VerifierSession.
ProtocolResult runProtocol(const ProtocolParams& params, const RegisterAssignment& assignment, std::uint32_t trial,
                           bool keepOutcomes = true);
ProtocolResult runProtocol(const ProtocolParams& params, std::shared_ptr<const SimulationContext> context,
                           const RegisterAssignment& assignment, std::uint32_t trial, bool keepOutcomes = true);

std::shared_ptr<const SimulationContext> makeContext(const ProtocolParams& params);

/// Fidelity of the target ensemble: the probability that ntilde registers
/// drawn uniformly from the post-test remainder are all ideal (or, for
/// tableau entries, the mean product of their fidelities).
double ensembleTargetFidelity(const ProtocolParams& params, const RegisterAssignment& assignment,
                              const std::vector<std::vector<RegisterId>>& groups);

nlohmann::json verdictToJson(const Verdict& verdict);
/// One verdict record: generator name, seed, trial and verdict fields.
nlohmann::json verdictRecord(const Verdict& verdict, std::uint64_t seed, std::uint32_t trial);
nlohmann::json transcriptToJson(const Transcript& transcript);

}  // namespace gsv
