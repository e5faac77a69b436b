// gsv: run verification experiments, emit bound sweeps, or play either side
// of a networked prover/verifier session.

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <thread>

#include "gsv/bounds.hpp"
#include "gsv/config.hpp"
#include "gsv/experiment.hpp"
#include "gsv/pauli.hpp"
#include "gsv/qudit.hpp"
#include "gsv/transport.hpp"

using namespace gsv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;

// Flags shared by run / serve-prover / verify-client, applied over the config file.
struct ConfigFlags {
  std::string configPath;
  std::vector<std::pair<std::string, std::optional<std::string>>> values;
  std::vector<std::string> sets;
  bool cv = false;
  bool strict = false;
  bool keepTranscripts = false;

  void attach(CLI::App* app) {
    app->add_option("--config", configPath, "key = value configuration file");
    static const std::vector<std::pair<const char*, const char*>> keyed{
        {"n", "vertices of the default path graph"},
        {"graph", "preset such as path(9), cycle(5), cluster2d(3,3), or a graph file"},
        {"d", "local dimension"},
        {"c", "soundness constant c"},
        {"epsilon", "i.i.d. error rate"},
        {"adversary", "honest | iid | single-bad | scripted"},
        {"trials", "number of trials"},
        {"seed", "64-bit seed"},
        {"ntilde", "number of target registers"},
        {"tau", "CV residual tolerance"},
        {"out", "output directory"},
        {"threads", "worker threads"},
        {"bad-model", "all-nonzero | uniform-nonzero | fixed"},
        {"bad-vector", "comma list: deviation vector or CV shifts"},
        {"bad-position", "uniform | register id"},
        {"assignment", "scripted assignment file"},
        {"squeeze-sigma", "CV finite-squeezing sigma"},
        {"meas-sigma", "CV homodyne noise sigma"},
        {"cv-model", "auto | gaussian | nullifier"},
        {"n-test", "override N_test (N_total follows as 2n N_test)"},
        {"endpoint", "host:port"},
        {"timeout-ms", "socket timeout"},
    };
    values.reserve(keyed.size());
    for (const auto& [name, help] : keyed) {
      values.emplace_back(name, std::nullopt);
      app->add_option(std::string("--") + name, values.back().second, help);
    }
    app->add_flag("--cv", cv, "continuous-variable mode");
    app->add_flag("--strict", strict, "refuse parameters outside the theorem regime");
    app->add_flag("--keep-transcripts", keepTranscripts, "write full transcripts");
    app->add_option("--set", sets, "extra key=value overrides");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = configPath.empty() ? ExperimentConfig{} : loadConfig(configPath);
    for (const auto& [name, value] : values) {
      if (!value) continue;
      std::string key = name;
      for (auto& ch : key)
        if (ch == '-') ch = '_';
      if (key == "assignment") key = "assignment_file";
      cfg.set(key, *value);
    }
    if (cv) cfg.cv = true;
    if (strict) cfg.strict = true;
    if (keepTranscripts) cfg.keepTranscripts = true;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

template <typename T>
std::vector<T> parseList(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v)) throw ConfigError("bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int runSelftest() {
  int failures = 0;
  auto check = [&](const char* name, const std::function<bool()>& body) {
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << '\n';
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    failures += ok ? 0 : 1;
  };

  check("philox4x32-10 known answer", [] {
    return philox4x32_10({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8};
  });
  check("N_test(9) = 2253", [] { return computeNTest(9) == 2253; });
  check("tableau matches dense oracle (cycle(4), d = 3)", [] {
    const auto g = presets::cycle(4);
    const DeviationVector a({0, 2, 1, 0}, 3);
    for (const auto& spec : buildStabilizers(g, 3)) {
      const auto exact = exactTestDistribution(applyDeviation(prepareGraphState(g, 3), a), spec);
      const auto snapped = snapToLattice(denseStatevectorOracle(g, 3, a, spec), 81);
      if (!snapped || *snapped != exact) return false;
    }
    return true;
  });
  check("honest n = 9 trial accepts with N_pass = 20277", [] {
    const auto p = ProtocolParams::standard(presets::path(9), 2, 13.0, 1);
    const auto r = runProtocol(p, honest(p.publicParams(0)), 0, false);
    return r.verdict.accepted && r.verdict.nPass == 20277;
  });
  check("acceptance probability closed form", [] { return std::abs(pAcc(2, 4, 0.1) - 0.81310473) < 1e-12; });
  check("loopback session matches in-process run", [] {
    auto p = ProtocolParams::standard(presets::path(3), 3, 13.0, 5);
    p.nTest = 20;
    p.nTotal = 120;
    const auto assignment = honest(p.publicParams(0));
    const auto local = runProtocol(p, assignment, 0);
    TcpListener listener(Endpoint{"127.0.0.1", 0});
    std::string proverSaw;
    std::thread prover([&] {
      auto ch = listener.accept();
      proverSaw = serveProverSession(ch, p, makeContext(p), assignment, 0).verdictRecord;
    });
    auto ch = connectTcp(Endpoint{"127.0.0.1", listener.port()});
    const auto remote = runVerifierClient(ch, p, 0);
    prover.join();
    return remote.result.transcript == local.transcript &&
           remote.verdictRecord == verdictRecord(local.verdict, p.seed, 0).dump() && proverSaw == remote.verdictRecord;
  });
  std::cout << (failures == 0 ? "selftest: all checks passed" : "selftest: failures") << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-state verification simulator"};
  app.require_subcommand(1);

  ConfigFlags runFlags, proverFlags, clientFlags;
  auto* run = app.add_subcommand("run", "run a Monte Carlo batch and write verdicts and a summary");
  runFlags.attach(run);

  auto* sweep = app.add_subcommand("sweep", "tabulate bounds, confidence, M and acceptance probabilities");
  std::string sweepN = "9,10,12,16,20,32", sweepC = "13,16,32,64,100,192", sweepEps = "0.001,0.01", sweepNt = "1,2";
  std::string sweepOut = "-";
  sweep->add_option("--n", sweepN, "comma list of n");
  sweep->add_option("--c", sweepC, "comma list of c");
  sweep->add_option("--epsilon", sweepEps, "comma list of epsilon");
  sweep->add_option("--ntilde", sweepNt, "comma list of target counts");
  sweep->add_option("--out", sweepOut, "CSV path, - for stdout");

  std::uint32_t proverTrial = 0, clientTrial = 0;
  auto* serve = app.add_subcommand("serve-prover", "listen and serve one verifier session");
  proverFlags.attach(serve);
  serve->add_option("--trial", proverTrial, "trial index");

  auto* client = app.add_subcommand("verify-client", "connect to a prover and run the verifier");
  clientFlags.attach(client);
  client->add_option("--trial", clientTrial, "trial index");

  auto* selftest = app.add_subcommand("selftest", "quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitConfig;
  }

  try {
    if (*selftest) return runSelftest();

    if (*sweep) {
      SweepGrid grid;
      try {
        grid.ns = parseList<int>(sweepN);
        grid.cs = parseList<double>(sweepC);
        grid.epsilons = parseList<double>(sweepEps);
        grid.nTildes = parseList<int>(sweepNt);
      } catch (const ConfigError& e) {
        std::cerr << "gsv: " << e.what() << '\n';
        return kExitConfig;
      }
      if (sweepOut == "-")
        writeSweepCsv(evaluateSweep(grid), std::cout);
      else
        emitSweep(grid, sweepOut);
      return 0;
    }

    ExperimentConfig cfg;
    try {
      cfg = (*run ? runFlags : *serve ? proverFlags : clientFlags).resolve();
    } catch (const ConfigError& e) {
      std::cerr << "gsv: " << e.what() << '\n';
      return kExitConfig;
    }
    const ProtocolParams params = cfg.protocolParams();
    const std::chrono::milliseconds timeout(cfg.timeoutMs);

    if (*run) {
      const auto summary = runExperiment(cfg);
      std::cout << summaryCsv(summary, cfg);
      return 0;
    }
    if (*serve) {
      TcpListener listener(Endpoint::parse(cfg.endpoint));
      std::cerr << "gsv: prover listening on " << Endpoint::parse(cfg.endpoint).host << ':' << listener.port() << '\n';
      auto channel = listener.accept(timeout);
      const auto assignment = cfg.assignment(params, proverTrial);
      const auto result = serveProverSession(channel, params, makeContext(params), assignment, proverTrial);
      std::cout << result.verdictRecord << '\n';
      return 0;
    }
    auto channel = connectTcp(Endpoint::parse(cfg.endpoint), timeout);
    const auto result = runVerifierClient(channel, params, clientTrial);
    std::cout << result.verdictRecord << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "gsv: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "gsv: " << e.what() << '\n';
    return kExitSimulation;
  }
}
