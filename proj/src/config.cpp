#include "gsv/config.hpp"
#include "gsv/transport.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsv/wire.hpp"

namespace gsv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parseNumber(const std::string& key, const std::string& value) {
  T v{};
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size() || value.empty())
    throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  return v;
}

bool parseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

std::string fmt(double v) { return formatDecimal(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename T>
std::vector<T> parseList(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parseNumber<T>(key, trim(item)));
  return out;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "graph") graph = value;
  else if (key == "n") graph = "path(" + std::to_string(parseNumber<int>(key, value)) + ")";
  else if (key == "d") d = parseNumber<int>(key, value);
  else if (key == "cv") cv = parseBool(key, value);
  else if (key == "c") c = parseNumber<double>(key, value);
  else if (key == "ntilde") nTilde = parseNumber<int>(key, value);
  else if (key == "n_test") nTest = parseNumber<std::int64_t>(key, value);
  else if (key == "n_total") nTotal = parseNumber<std::int64_t>(key, value);
  else if (key == "trials") trials = parseNumber<std::int64_t>(key, value);
  else if (key == "seed") seed = parseNumber<std::uint64_t>(key, value);
  else if (key == "strict") strict = parseBool(key, value);
  else if (key == "adversary") adversary = value;
  else if (key == "epsilon") epsilon = parseNumber<double>(key, value);
  else if (key == "bad_model") badModel = value;
  else if (key == "bad_vector") badVector = value;
  else if (key == "bad_position") badPosition = value;
  else if (key == "assignment_file") assignmentFile = value;
  else if (key == "correlation_seed") correlationSeed = parseNumber<std::uint64_t>(key, value);
  else if (key == "squeeze_sigma") squeezeSigma = parseNumber<double>(key, value);
  else if (key == "meas_sigma") measSigma = parseNumber<double>(key, value);
  else if (key == "tau") tau = parseNumber<double>(key, value);
  else if (key == "x_window") xWindow = parseNumber<double>(key, value);
  else if (key == "cv_model") cvModel = value;
  else if (key == "out") out = value;
  else if (key == "threads") threads = parseNumber<int>(key, value);
  else if (key == "keep_transcripts") keepTranscripts = parseBool(key, value);
  else if (key == "endpoint") endpoint = value;
  else if (key == "timeout_ms") timeoutMs = parseNumber<std::int64_t>(key, value);
  else throw ConfigError("config: unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  return {{"graph", graph},
          {"d", std::to_string(d)},
          {"cv", fmt(cv)},
          {"c", fmt(c)},
          {"ntilde", std::to_string(nTilde)},
          {"n_test", std::to_string(nTest)},
          {"n_total", std::to_string(nTotal)},
          {"trials", std::to_string(trials)},
          {"seed", std::to_string(seed)},
          {"strict", fmt(strict)},
          {"adversary", adversary},
          {"epsilon", fmt(epsilon)},
          {"bad_model", badModel},
          {"bad_vector", badVector},
          {"bad_position", badPosition},
          {"assignment_file", assignmentFile},
          {"correlation_seed", std::to_string(correlationSeed)},
          {"squeeze_sigma", fmt(squeezeSigma)},
          {"meas_sigma", fmt(measSigma)},
          {"tau", fmt(tau)},
          {"x_window", fmt(xWindow)},
          {"cv_model", cvModel},
          {"out", out},
          {"threads", std::to_string(threads)},
          {"keep_transcripts", fmt(keepTranscripts)},
          {"endpoint", endpoint},
          {"timeout_ms", std::to_string(timeoutMs)},
          {"rng", kRngName}};
}

std::string ExperimentConfig::echo() const {
  std::string s;
  for (const auto& [k, v] : entries()) s += k + " = " + v + "\n";
  return s;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (trials > (1 << 24)) throw ConfigError("config: trials must be < 2^24");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (timeoutMs < 1) throw ConfigError("config: timeout_ms must be positive");
  static const std::vector<std::string> adversaries{"honest", "iid", "single-bad", "scripted"};
  if (std::find(adversaries.begin(), adversaries.end(), adversary) == adversaries.end())
    throw ConfigError("config: unknown adversary '" + adversary + "'");
  if (adversary == "iid" && !(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("config: epsilon must lie in [0, 1]");
  if (adversary == "iid" || adversary == "single-bad") {
    static const std::vector<std::string> models{"all-nonzero", "uniform-nonzero", "fixed"};
    if (std::find(models.begin(), models.end(), badModel) == models.end())
      throw ConfigError("config: unknown bad_model '" + badModel + "'");
    if (cv && badModel != "fixed") throw ConfigError("config: CV adversaries need bad_model = fixed with shifts");
    if (badModel == "fixed" && badVector.empty()) throw ConfigError("config: bad_model = fixed needs bad_vector");
    if (adversary == "single-bad" && badModel == "uniform-nonzero")
      throw ConfigError("config: single-bad needs a fixed bad state");
  }
  if (adversary == "scripted") {
    if (assignmentFile.empty()) throw ConfigError("config: scripted adversary needs assignment_file");
    if (!std::filesystem::exists(assignmentFile)) throw ConfigError("config: no such file: " + assignmentFile);
  }
  if (cvModel != "auto" && cvModel != "gaussian" && cvModel != "nullifier")
    throw ConfigError("config: cv_model must be auto, gaussian or nullifier");
  try {
    protocolParams().validate();
    Endpoint::parse(endpoint);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ProtocolParams ExperimentConfig::protocolParams() const {
  WeightedHypergraph g;
  try {
    g = resolveGraph(graph);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: graph: ") + e.what());
  }
  ProtocolParams p;
  if (cv) {
    NoiseModel noise{squeezeSigma, measSigma, xWindow};
    p = ProtocolParams::standardCV(std::move(g), noise, tau, c, seed, nTilde);
    if (cvModel == "gaussian") p.cvModel = CVModelKind::Gaussian;
    if (cvModel == "nullifier") p.cvModel = CVModelKind::Nullifier;
  } else {
    p = ProtocolParams::standard(std::move(g), d, c, seed, nTilde);
  }
  if (nTest > 0) {
    p.nTest = nTest;
    p.nTotal = 2LL * p.n() * nTest;
  }
  if (nTotal > 0) p.nTotal = nTotal;
  p.strict = strict;
  return p;
}

RegisterAssignment ExperimentConfig::assignment(const ProtocolParams& params, std::uint32_t trial) const {
  const std::uint64_t base = correlationSeed ? correlationSeed : seed;
  const PublicParams pub = params.publicParams(base + trial * 0x9e3779b97f4a7c15ULL);
  if (adversary == "honest") return honest(pub);
  if (adversary == "scripted") return scriptedFromFile(pub, assignmentFile);

  RegisterState bad;
  if (badModel == "fixed") {
    if (cv)
      bad = ShiftedRegister{parseList<double>("bad_vector", badVector)};
    else
      bad = DeviatedRegister{DeviationVector(parseList<int>("bad_vector", badVector), params.d)};
  } else {
    bad = DeviatedRegister{DeviationVector(std::vector<int>(static_cast<std::size_t>(params.n()), 1), params.d)};
  }
  if (adversary == "iid") {
    const auto dist = badModel == "uniform-nonzero" ? DeviationDistribution::uniformNonzero(params.n(), params.d)
                                                    : DeviationDistribution::fixed(bad);
    return iidNoise(pub, epsilon, dist);
  }
  std::optional<RegisterId> position;
  if (badPosition != "uniform") position = parseNumber<RegisterId>("bad_position", badPosition);
  return singleBadRegister(pub, bad, position);
}

ExperimentConfig parseConfig(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: line " + std::to_string(lineNo) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key == "rng") {
      if (trim(line.substr(eq + 1)) != kRngName) throw ConfigError("config: only rng = philox4x32-10 is supported");
      continue;
    }
    cfg.set(key, line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parseConfig(in);
}

}  // namespace gsv
