#pragma once

// Experiment configuration: a flat `key = value` text file. Every key has a
// default; the resolved set is echoed into each output directory.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsv/adversary.hpp"
#include "gsv/verifier.hpp"

namespace gsv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string graph = "path(9)";
  int d = 2;
  bool cv = false;
  double c = 13.0;
  int nTilde = 1;
  std::int64_t nTest = 0;   // 0: ceil(5 n^4 ln n / 32)
  std::int64_t nTotal = 0;  // 0: 2 n N_test
  std::int64_t trials = 10;
  std::uint64_t seed = 1;
  bool strict = false;

  std::string adversary = "honest";  // honest | iid | single-bad | scripted
  double epsilon = 0.01;
  std::string badModel = "all-nonzero";  // all-nonzero | uniform-nonzero | fixed
  std::string badVector;                 // comma list for `fixed` (deviation, or CV shifts)
  std::string badPosition = "uniform";   // uniform | register id
  std::string assignmentFile;
  std::uint64_t correlationSeed = 0;  // 0: same as seed

  double squeezeSigma = 0.0;
  double measSigma = 0.0;
  double tau = 0.0;
  double xWindow = 10.0;
  std::string cvModel = "auto";  // auto | gaussian | nullifier

  std::string out = "gsv-out";
  int threads = 1;
  bool keepTranscripts = false;
  std::string endpoint = "127.0.0.1:7700";
  std::int64_t timeoutMs = 30000;

  /// Applies one key; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Resolved `key = value` lines in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string echo() const;

  /// Checks cross-field constraints and referenced files.
  void validate() const;

  ProtocolParams protocolParams() const;
  /// Adversary model for one trial. The correlation seed of trial t is
  /// correlation_seed + t * 0x9e3779b97f4a7c15 (mod 2^64).
  RegisterAssignment assignment(const ProtocolParams& params, std::uint32_t trial) const;
};

ExperimentConfig parseConfig(std::istream& in);
ExperimentConfig loadConfig(const std::string& path);

}  // namespace gsv
