#include "gsv/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "gsv/bounds.hpp"
#include "gsv/pauli.hpp"

namespace gsv {

std::int64_t computeNTest(int n) {
  if (n < 1) throw std::invalid_argument("computeNTest: need n >= 1");
  const long double nn = n;
  return static_cast<std::int64_t>(std::ceil(5.0L * nn * nn * nn * nn * std::log(nn) / 32.0L));
}

bool acceptancePredicate(int n, std::int64_t nPass, std::int64_t nTest) {
  const std::int64_t nn = n;
  return 2 * nn * nPass >= (2 * nn * nn - 1) * nTest;
}

double certifiedFidelityBound(int n, double c, double nPass, double nTest) {
  if (nTest <= 0.0) throw std::invalid_argument("certifiedFidelityBound: N_test must be positive");
  return 1.0 - 2.0 * std::sqrt(c) / n - 2.0 * n * (1.0 - nPass / (n * nTest));
}

double multiCopyBound(int n, double c, int nTilde, double nPass, double nTest) {
  if (nTest <= 0.0) throw std::invalid_argument("multiCopyBound: N_test must be positive");
  const double denom = n * nTest - (nTilde - 1);
  if (!(denom > 0.0)) throw std::invalid_argument("multiCopyBound: n N_test - (ntilde - 1) must be positive");
  return 1.0 - (2.0 * std::sqrt(c) + 2.0 * n * n - 2.0 * n * nPass / nTest) * nTilde * nTest / denom;
}

ProtocolParams ProtocolParams::standard(WeightedHypergraph graph, int d, double c, std::uint64_t seed, int nTilde) {
  ProtocolParams p;
  p.graph = std::move(graph);
  p.d = d;
  p.c = c;
  p.seed = seed;
  p.nTilde = nTilde;
  p.nTest = computeNTest(p.n());
  p.nTotal = 2LL * p.n() * p.nTest;
  return p;
}

ProtocolParams ProtocolParams::standardCV(WeightedHypergraph graph, const NoiseModel& noise, double tau, double c,
                                          std::uint64_t seed, int nTilde) {
  ProtocolParams p = standard(std::move(graph), 2, c, seed, nTilde);
  p.cv = true;
  p.noise = noise;
  p.tau = tau;
  return p;
}

std::vector<std::string> ProtocolParams::regimeFlags() const {
  std::vector<std::string> flags;
  const int nn = n();
  if (nn < 9 * nTilde) flags.emplace_back("n-below-minimum");
  double cMax = 0.0;
  if (nTilde == 1) {
    cMax = (nn - 1.0) * (nn - 1.0) / 4.0;
  } else {
    const double ln = std::log(static_cast<double>(nn));
    const double inner = static_cast<double>(nn) / nTilde -
                         32.0 * (nTilde - 1) / (5.0 * nTilde * std::pow(static_cast<double>(nn), 4) * ln) - 1.0;
    cMax = inner * inner / 4.0;
  }
  if (!(c > 64.0 / 5.0 && c < cMax)) flags.emplace_back("c-out-of-range");
  if (nn >= 1 && nTest != computeNTest(nn)) flags.emplace_back("n-test-nonstandard");
  if (nTotal != 2LL * nn * nTest) flags.emplace_back("n-total-nonstandard");
  return flags;
}

void ProtocolParams::validate() const {
  const int nn = n();
  if (nn < 1) throw std::invalid_argument("protocol: graph must have at least one vertex");
  if (nTest < 1) throw std::invalid_argument("protocol: N_test must be positive");
  if (nTilde < 1) throw std::invalid_argument("protocol: ntilde must be positive");
  if (nTotal < nn * nTest + nTilde) throw std::invalid_argument("protocol: N_total too small for the groups and targets");
  if (nTotal > std::int64_t{0xffffffff}) throw std::invalid_argument("protocol: N_total exceeds 2^32 - 1");
  if (!(c > 0.0)) throw std::invalid_argument("protocol: c must be positive");
  if (nTilde > 1 && !(nn * static_cast<double>(nTest) - (nTilde - 1) > 0.0))
    throw std::invalid_argument("protocol: n N_test must exceed ntilde - 1");
  if (cv) {
    noise.validate();
    if (tau < 0.0) throw std::invalid_argument("protocol: tau must be non-negative");
    if (tau == 0.0 && !noise.symbolic()) throw std::invalid_argument("protocol: tau = 0 requires zero noise");
  } else {
    buildStabilizers(graph, d);
  }
  if (strict) {
    const auto flags = regimeFlags();
    if (!flags.empty()) throw std::invalid_argument("protocol: outside the theorem regime (" + flags.front() + ")");
  }
}

PublicParams ProtocolParams::publicParams(std::uint64_t correlationSeed) const {
  PublicParams p;
  p.n = n();
  if (!cv) p.d = d;
  p.nTotal = nTotal;
  p.correlationSeed = correlationSeed;
  return p;
}

GroupSelection sampleGroups(const ProtocolParams& params, Rng& rng) {
  const int n = params.n();
  const std::int64_t used = n * params.nTest + params.nTilde;
  if (params.nTotal < used) throw std::invalid_argument("sampleGroups: insufficient registers");
  std::vector<RegisterId> perm(static_cast<std::size_t>(params.nTotal));
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<RegisterId>(k + 1);
  // Partial Fisher-Yates: the first `used` slots are a uniform ordered sample.
  for (std::int64_t k = 0; k < used; ++k) {
    const auto j = k + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params.nTotal - k)));
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
  }
  GroupSelection sel;
  sel.roles.assign(perm.size(), RegisterRole{});
  auto it = perm.begin();
  for (int i = 1; i <= n; ++i) {
    std::vector<RegisterId> group(it, it + params.nTest);
    it += params.nTest;
    std::sort(group.begin(), group.end());
    for (RegisterId r : group) sel.roles[static_cast<std::size_t>(r - 1)] = {RegisterRole::Test, i};
    sel.groups.push_back(std::move(group));
  }
  sel.targets.assign(it, it + params.nTilde);
  std::sort(sel.targets.begin(), sel.targets.end());
  for (RegisterId r : sel.targets) sel.roles[static_cast<std::size_t>(r - 1)] = {RegisterRole::Target, 0};
  return sel;
}

int TestRecord::group() const {
  return std::visit([](const auto& o) { return o.vertex; }, outcome);
}

bool TestRecord::passed() const {
  return std::visit([](const auto& o) { return o.passed; }, outcome);
}

Verdict computeVerdict(const ProtocolParams& params, std::int64_t nPass) {
  Verdict v;
  v.n = params.n();
  v.nTilde = params.nTilde;
  v.c = params.c;
  v.nPass = nPass;
  v.nTest = params.nTest;
  v.accepted = acceptancePredicate(v.n, nPass, params.nTest);
  const auto np = static_cast<double>(nPass);
  const auto nt = static_cast<double>(params.nTest);
  v.fidelityBoundRaw = params.nTilde == 1 ? certifiedFidelityBound(v.n, params.c, np, nt)
                                          : multiCopyBound(v.n, params.c, params.nTilde, np, nt);
  v.fidelityBound = std::min(v.fidelityBoundRaw, 1.0);
  if (v.n >= 2) {
    const auto chain = totalConfidence(v.n, params.c);
    v.confidenceRaw = chain.raw;
    v.confidence = chain.clamped;
  }
  v.certifiedCount = certifiedCount(v.n, params.nTest, nPass, params.c);
  v.regimeFlags = params.regimeFlags();
  return v;
}

VerifierSession::VerifierSession(const ProtocolParams& params, std::uint32_t trial, bool keepOutcomes)
    : params_(params), keep_(keepOutcomes) {
  Rng rng(params.seed, trial, StreamPurpose::Verifier);
  selection_ = sampleGroups(params, rng);
  const int n = params.n();
  plans_.assign(static_cast<std::size_t>(n), std::vector<Basis>(static_cast<std::size_t>(n), Basis::Discard));
  if (params.cv) {
    cvSpecs_ = buildNullifiers(params.graph);
    for (int i = 0; i < n; ++i)
      for (const auto& [v, b] : testSites(cvSpecs_[static_cast<std::size_t>(i)]))
        plans_[static_cast<std::size_t>(i)][static_cast<std::size_t>(v - 1)] = b;
  } else {
    quditSpecs_ = buildStabilizers(params.graph, params.d);
    for (int i = 0; i < n; ++i)
      for (const auto& [v, b] : testSites(quditSpecs_[static_cast<std::size_t>(i)]))
        plans_[static_cast<std::size_t>(i)][static_cast<std::size_t>(v - 1)] = b;
  }
  transcript_.seed = params.seed;
  transcript_.trial = trial;
  transcript_.n = n;
  transcript_.nTest = params.nTest;
  transcript_.nTotal = params.nTotal;
  transcript_.nTilde = params.nTilde;
  transcript_.groupMembers = selection_.groups;
  transcript_.targets = selection_.targets;
  transcript_.nPassPerGroup.assign(static_cast<std::size_t>(n), 0);
  pendingQudit_.reserve(static_cast<std::size_t>(n));
  pendingCV_.reserve(static_cast<std::size_t>(n));
}

Basis VerifierSession::basisFor(RegisterId id, Vertex site) const {
  const RegisterRole& role = selection_.role(id);
  if (role.kind != RegisterRole::Test) return Basis::Discard;
  return plans_[static_cast<std::size_t>(role.group - 1)][static_cast<std::size_t>(site - 1)];
}

void VerifierSession::beginRegister(RegisterId id) {
  if (open_) throw ProtocolError("register " + std::to_string(current_) + " still open");
  if (id != current_ + 1) throw ProtocolError("expected register " + std::to_string(current_ + 1) + ", got " + std::to_string(id));
  if (id > params_.nTotal) throw ProtocolError("register " + std::to_string(id) + " beyond N_total");
  current_ = id;
  site_ = 0;
  open_ = true;
  pendingQudit_.clear();
  pendingCV_.clear();
}

void VerifierSession::recordOutcome(Vertex site, const Outcome& value) {
  if (!open_) throw ProtocolError("outcome outside a register");
  if (site != site_ + 1 || site > params_.n())
    throw ProtocolError("expected site " + std::to_string(site_ + 1) + ", got " + std::to_string(site));
  site_ = site;
  const Basis b = basisFor(current_, site);
  if (b == Basis::Discard) {
    if (!std::holds_alternative<std::monostate>(value)) throw ProtocolError("outcome for a discarded site");
    return;
  }
  if (params_.cv) {
    const auto* x = std::get_if<double>(&value);
    if (!x || !std::isfinite(*x)) throw ProtocolError("expected a finite quadrature outcome");
    pendingCV_.push_back({site, b, *x});
    highWater_ = std::max(highWater_, pendingCV_.size());
  } else {
    const auto* k = std::get_if<int>(&value);
    if (!k || *k < 0 || *k >= params_.d) throw ProtocolError("expected a qudit outcome in [0, d)");
    pendingQudit_.push_back({site, b, *k});
    highWater_ = std::max(highWater_, pendingQudit_.size());
  }
}

void VerifierSession::endRegister() {
  if (!open_) throw ProtocolError("no open register");
  if (site_ != params_.n()) throw ProtocolError("register closed before its last site");
  open_ = false;
  const RegisterRole& role = selection_.role(current_);
  if (role.kind != RegisterRole::Test) return;
  const auto g = static_cast<std::size_t>(role.group - 1);
  TestRecord rec;
  rec.reg = current_;
  if (params_.cv)
    rec.outcome = scoreTest(cvSpecs_[g], params_.n(), params_.tau, std::move(pendingCV_));
  else
    rec.outcome = scoreTest(quditSpecs_[g], std::move(pendingQudit_));
  pendingCV_.clear();
  pendingQudit_.clear();
  if (rec.passed()) ++transcript_.nPassPerGroup[g];
  if (keep_) transcript_.tests.push_back(std::move(rec));
}

ProtocolResult VerifierSession::finish() {
  if (open_ || current_ != params_.nTotal) throw ProtocolError("session ended before every register was seen");
  ProtocolResult out;
  std::int64_t nPass = 0;
  for (auto k : transcript_.nPassPerGroup) nPass += k;
  out.verdict = computeVerdict(params_, nPass);
  out.transcript = std::move(transcript_);
  return out;
}

std::shared_ptr<const SimulationContext> makeContext(const ProtocolParams& params) {
  if (params.cv) return SimulationContext::continuous(params.graph, params.noise, params.cvModel);
  return SimulationContext::qudit(params.graph, params.d);
}

ProtocolResult runProtocol(const ProtocolParams& params, const RegisterAssignment& assignment, std::uint32_t trial,
                           bool keepOutcomes) {
  params.validate();
  return runProtocol(params, makeContext(params), assignment, trial, keepOutcomes);
}

ProtocolResult runProtocol(const ProtocolParams& params, std::shared_ptr<const SimulationContext> context,
                           const RegisterAssignment& assignment, std::uint32_t trial, bool keepOutcomes) {
  validateAssignment(params.publicParams(assignment.correlationSeed), assignment);
  VerifierSession session(params, trial, keepOutcomes);
  ProverDevice device(std::move(context), assignment, params.seed, trial);
  const int n = params.n();
  for (RegisterId id = 1; id <= params.nTotal; ++id) {
    session.beginRegister(id);
    device.beginRegister(id);
    for (Vertex site = 1; site <= n; ++site) session.recordOutcome(site, device.measure(site, session.basisFor(id, site)));
    device.endRegister();
    session.endRegister();
  }
  return session.finish();
}

double ensembleTargetFidelity(const ProtocolParams& params, const RegisterAssignment& assignment,
                              const std::vector<std::vector<RegisterId>>& groups) {
  std::vector<bool> tested(static_cast<std::size_t>(params.nTotal), false);
  for (const auto& g : groups)
    for (RegisterId r : g) tested.at(static_cast<std::size_t>(r - 1)) = true;
  const auto k = static_cast<std::size_t>(params.nTilde);
  std::vector<double> p(k + 1, 0.0);
  p[0] = 1.0;
  std::size_t m = 0;
  for (RegisterId id = 1; id <= params.nTotal; ++id) {
    if (tested[static_cast<std::size_t>(id - 1)]) continue;
    const double f = registerFidelity(assignment.at(id), params.graph);
    ++m;
    const double dm = static_cast<double>(m);
    for (std::size_t j = std::min(m, k); j >= 1; --j)
      p[j] = (dm - static_cast<double>(j)) / dm * p[j] + static_cast<double>(j) / dm * f * p[j - 1];
  }
  return m >= k ? p[k] : 0.0;
}

nlohmann::json verdictToJson(const Verdict& v) {
  return {{"accepted", v.accepted},
          {"n", v.n},
          {"n_tilde", v.nTilde},
          {"c", v.c},
          {"n_pass", v.nPass},
          {"n_test", v.nTest},
          {"fidelity_bound", v.fidelityBound},
          {"fidelity_bound_raw", v.fidelityBoundRaw},
          {"confidence", v.confidence},
          {"confidence_raw", v.confidenceRaw},
          {"certified_count", v.certifiedCount},
          {"in_theorem_regime", v.inTheoremRegime()},
          {"regime_flags", v.regimeFlags}};
}

nlohmann::json verdictRecord(const Verdict& verdict, std::uint64_t seed, std::uint32_t trial) {
  nlohmann::json j = verdictToJson(verdict);
  j["rng"] = kRngName;
  j["seed"] = seed;
  j["trial"] = trial;
  return j;
}

nlohmann::json transcriptToJson(const Transcript& t) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& rec : t.tests) {
    nlohmann::json raw = nlohmann::json::array();
    nlohmann::json entry = {{"register", rec.reg}, {"group", rec.group()}, {"passed", rec.passed()}};
    std::visit(
        [&](const auto& o) {
          entry["residual"] = o.residual;
          for (const auto& s : o.rawOutcomes) raw.push_back({s.vertex, basisName(s.basis), s.value});
        },
        rec.outcome);
    entry["raw"] = std::move(raw);
    tests.push_back(std::move(entry));
  }
  return {{"rng", kRngName},     {"seed", t.seed},
          {"trial", t.trial},    {"n", t.n},
          {"n_test", t.nTest},   {"n_total", t.nTotal},
          {"n_tilde", t.nTilde}, {"groups", t.groupMembers},
          {"targets", t.targets}, {"n_pass_per_group", t.nPassPerGroup},
          {"tests", std::move(tests)}};
}

}  // namespace gsv
