#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsv/experiment.hpp"

using namespace gsv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gsv-harness-" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig smallConfig() {
  std::istringstream in(
      "# small batch\n"
      "graph = cycle(4)\n"
      "d = 3\n"
      "n_test = 15\n"
      "trials = 12\n"
      "seed = 99\n"
      "adversary = iid\n"
      "epsilon = 0.05\n"
      "bad_model = uniform-nonzero\n");
  return parseConfig(in);
}

}  // namespace

TEST_CASE("config parsing and echo") {
  const auto cfg = smallConfig();
  CHECK(cfg.graph == "cycle(4)");
  CHECK(cfg.d == 3);
  CHECK(cfg.trials == 12);
  CHECK(cfg.protocolParams().nTotal == 2 * 4 * 15);

  std::istringstream echoed(cfg.echo());
  const auto again = parseConfig(echoed);
  CHECK(again.echo() == cfg.echo());
  CHECK(cfg.echo().find("rng = philox4x32-10") != std::string::npos);
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parseConfig(in);
  };
  CHECK_THROWS_AS(parse("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse("d = three\n"), ConfigError);
  CHECK_THROWS_AS(parse("rng = mt19937\n"), ConfigError);
  CHECK_THROWS_AS(parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse("adversary = cunning\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("adversary = scripted\n").validate(), ConfigError);
  CHECK_NOTHROW(parse("n = 5\nd = 7\n").validate());
}

TEST_CASE("n sets a path graph") {
  ExperimentConfig cfg;
  cfg.set("n", "6");
  CHECK(cfg.protocolParams().n() == 6);
  CHECK(cfg.graph == "path(6)");
}

TEST_CASE("per-trial assignments are independent but replayable") {
  const auto cfg = smallConfig();
  const auto p = cfg.protocolParams();
  CHECK(cfg.assignment(p, 3).perRegister == cfg.assignment(p, 3).perRegister);
  CHECK(cfg.assignment(p, 3).perRegister != cfg.assignment(p, 4).perRegister);
}

TEST_CASE("output files are byte-identical across reruns and thread counts") {
  auto cfg = smallConfig();
  cfg.keepTranscripts = true;
  const auto a = scratch("a"), b = scratch("b");
  cfg.out = a.string();
  cfg.threads = 1;
  runExperiment(cfg);
  cfg.out = b.string();
  cfg.threads = 3;
  runExperiment(cfg);
  for (const char* f : {"verdicts.jsonl", "summary.csv", "transcripts.jsonl"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  // config.txt differs only in out/threads
  CHECK(slurp(a / "config.txt").find("threads = 1") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("summary matches the per-trial verdicts") {
  const auto cfg = smallConfig();
  const auto results = runTrials(cfg);
  REQUIRE(results.size() == 12);
  const auto s = summarize(results);
  std::int64_t accepted = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    CHECK(results[k].trial == k);
    accepted += results[k].verdict.accepted;
  }
  CHECK(s.accepted == accepted);
  CHECK(s.acceptanceRate == doctest::Approx(accepted / 12.0));
  const auto line = verdictLine(results[0], cfg);
  CHECK(line.find("\"adversary\":\"iid\"") != std::string::npos);
  CHECK(line.find("\"ensemble_fidelity\"") != std::string::npos);
}

TEST_CASE("scripted assignment from a file") {
  const auto dir = scratch("scripted");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "a.txt");
    for (int k = 0; k < 2 * 3 * 4; ++k) f << (k == 5 ? "dev 1,1,1\n" : "ideal\n");
  }
  ExperimentConfig cfg;
  cfg.set("n", "3");
  cfg.set("n_test", "4");
  cfg.set("adversary", "scripted");
  cfg.set("assignment_file", (dir / "a.txt").string());
  cfg.set("trials", "3");
  cfg.validate();
  const auto p = cfg.protocolParams();
  const auto a = cfg.assignment(p, 0);
  CHECK(std::holds_alternative<DeviatedRegister>(a.at(6)));
  CHECK(runTrials(cfg).size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("CV batch") {
  ExperimentConfig cfg;
  cfg.set("n", "3");
  cfg.set("cv", "true");
  cfg.set("squeeze_sigma", "0.2");
  cfg.set("tau", "0.8");
  cfg.set("n_test", "10");
  cfg.set("trials", "4");
  cfg.set("adversary", "single-bad");
  cfg.set("bad_model", "fixed");
  cfg.set("bad_vector", "3,3,3");
  cfg.validate();
  const auto results = runTrials(cfg);
  CHECK(results.size() == 4);
}

TEST_CASE("sweep rows") {
  SweepGrid grid;
  grid.ns = {10};
  grid.cs = {192};
  grid.epsilons = {0.01};
  grid.nTildes = {1};
  const auto rows = evaluateSweep(grid);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].t == 15.0);
  CHECK(rows[0].nTest == 3598);
  CHECK(rows[0].nTotal == 71960);
  CHECK(rows[0].M == doctest::Approx(34827657002740.595).epsilon(1e-13));
  CHECK(rows[0].bound == doctest::Approx(1.0 - (2 * std::sqrt(192.0) + 1) / 10).epsilon(1e-12));

  std::ostringstream os;
  writeSweepCsv(evaluateSweep(SweepGrid{}), os);
  const auto text = os.str();
  CHECK(text.rfind("n,c,epsilon,ntilde,N_test,N_total,bound,confidence,M,t,p_acc,p_acc_prior,in_regime\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 6 * 6 * 2 * 2);
}
