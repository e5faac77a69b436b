#pragma once

// Monte Carlo batches over independent trials, and the sweep table of the
// closed-form quantities.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gsv/config.hpp"
#include "gsv/verifier.hpp"

namespace gsv {

struct TrialResult {
  std::uint32_t trial = 0;
  Verdict verdict;
  double ensembleFidelity = 0.0;
  bool violation = false;  // ensemble fidelity below the raw certified bound
  std::optional<Transcript> transcript;
};

struct ExperimentSummary {
  std::int64_t trials = 0;
  std::int64_t accepted = 0;
  double acceptanceRate = 0.0;
  double meanBound = 0.0;
  double meanEnsembleFidelity = 0.0;
  std::int64_t violations = 0;
  double violationRate = 0.0;
};

/// Runs every trial (config.threads workers); results are in trial order
/// regardless of scheduling.
std::vector<TrialResult> runTrials(const ExperimentConfig& config);
ExperimentSummary summarize(const std::vector<TrialResult>& results);

/// runTrials, then writes config.txt, verdicts.jsonl, summary.csv (and
/// transcripts.jsonl when kept) under config.out.
ExperimentSummary runExperiment(const ExperimentConfig& config);

std::string verdictLine(const TrialResult& result, const ExperimentConfig& config);
std::string summaryCsv(const ExperimentSummary& summary, const ExperimentConfig& config);

struct SweepGrid {
  std::vector<int> ns{9, 10, 12, 16, 20, 32};
  std::vector<double> cs{13, 16, 32, 64, 100, 192};
  std::vector<double> epsilons{0.001, 0.01};
  std::vector<int> nTildes{1, 2};
};

struct SweepRow {
  int n = 0;
  double c = 0.0;
  double epsilon = 0.0;
  int nTilde = 1;
  std::int64_t nTest = 0;
  std::int64_t nTotal = 0;
  double bound = 0.0;  // certified bound at the acceptance threshold
  double confidence = 0.0;
  double M = 0.0;
  double t = 0.0;
  double pAcc = 0.0;
  double pAccPrior = 0.0;
  bool inRegime = false;
};

std::vector<SweepRow> evaluateSweep(const SweepGrid& grid);
void writeSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out);
void emitSweep(const SweepGrid& grid, const std::string& path);

}  // namespace gsv
