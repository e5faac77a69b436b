#include "gsv/experiment.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gsv/wire.hpp"

namespace gsv {

std::vector<TrialResult> runTrials(const ExperimentConfig& config) {
  config.validate();
  const ProtocolParams params = config.protocolParams();
  const auto context = makeContext(params);
  const auto count = static_cast<std::size_t>(config.trials);
  std::vector<TrialResult> results(count);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
      try {
        const auto trial = static_cast<std::uint32_t>(k);
        const RegisterAssignment assignment = config.assignment(params, trial);
        ProtocolResult run = runProtocol(params, context, assignment, trial, config.keepTranscripts);
        TrialResult& r = results[k];
        r.trial = trial;
        r.ensembleFidelity = ensembleTargetFidelity(params, assignment, run.transcript.groupMembers);
        r.violation = r.ensembleFidelity < run.verdict.fidelityBoundRaw;
        r.verdict = std::move(run.verdict);
        if (config.keepTranscripts) r.transcript = std::move(run.transcript);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const int workers = std::min<int>(config.threads, static_cast<int>(count));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

ExperimentSummary summarize(const std::vector<TrialResult>& results) {
  ExperimentSummary s;
  s.trials = static_cast<std::int64_t>(results.size());
  double bound = 0.0, fidelity = 0.0;
  for (const auto& r : results) {
    s.accepted += r.verdict.accepted ? 1 : 0;
    s.violations += r.violation ? 1 : 0;
    bound += r.verdict.fidelityBound;
    fidelity += r.ensembleFidelity;
  }
  if (s.trials > 0) {
    const auto t = static_cast<double>(s.trials);
    s.acceptanceRate = static_cast<double>(s.accepted) / t;
    s.violationRate = static_cast<double>(s.violations) / t;
    s.meanBound = bound / t;
    s.meanEnsembleFidelity = fidelity / t;
  }
  return s;
}

std::string verdictLine(const TrialResult& result, const ExperimentConfig& config) {
  nlohmann::json j = verdictRecord(result.verdict, config.seed, result.trial);
  j["adversary"] = config.adversary;
  j["ensemble_fidelity"] = result.ensembleFidelity;
  j["violation"] = result.violation;
  return j.dump();
}

std::string summaryCsv(const ExperimentSummary& s, const ExperimentConfig& config) {
  std::ostringstream os;
  os << "trials,accepted,acceptance_rate,mean_fidelity_bound,mean_ensemble_fidelity,violations,violation_rate,"
        "adversary,rng,seed\n";
  os << s.trials << ',' << s.accepted << ',' << formatDecimal(s.acceptanceRate) << ',' << formatDecimal(s.meanBound)
     << ',' << formatDecimal(s.meanEnsembleFidelity) << ',' << s.violations << ',' << formatDecimal(s.violationRate)
     << ',' << config.adversary << ',' << kRngName << ',' << config.seed << '\n';
  return os.str();
}

ExperimentSummary runExperiment(const ExperimentConfig& config) {
  const auto results = runTrials(config);
  const auto summary = summarize(results);
  const std::filesystem::path dir(config.out);
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  open("config.txt") << config.echo();
  {
    auto f = open("verdicts.jsonl");
    for (const auto& r : results) f << verdictLine(r, config) << '\n';
  }
  open("summary.csv") << summaryCsv(summary, config);
  if (config.keepTranscripts) {
    auto f = open("transcripts.jsonl");
    for (const auto& r : results) f << transcriptToJson(*r.transcript).dump() << '\n';
  }
  return summary;
}

}  // namespace gsv
