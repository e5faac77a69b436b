#pragma once

// Prover-side measurement device. It holds one register at a time and
// answers single-site measurements in site order, which is all the verifier
// ever asks for. The in-process protocol and the wire prover both drive this
// class, so their outcomes agree draw for draw.

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>

#include "gsv/adversary.hpp"
#include "gsv/cv.hpp"
#include "gsv/dense.hpp"
#include "gsv/graph.hpp"
#include "gsv/rng.hpp"
#include "gsv/tableau.hpp"

namespace gsv {

/// monostate for a discarded site, int for a qudit digit, double for a quadrature.
using Outcome = std::variant<std::monostate, int, double>;

/// Immutable per-experiment simulation data shared by all trials.
struct SimulationContext {
  WeightedHypergraph graph;
  bool cv = false;
  int d = 2;
  NoiseModel noise;
  std::optional<StabilizerTableau> tableauTemplate;  // prime d
  std::optional<DenseState> denseTemplate;           // composite d
  std::optional<CVRegisterModel> cvHonest;

  static std::shared_ptr<const SimulationContext> qudit(const WeightedHypergraph& graph, int d);
  static std::shared_ptr<const SimulationContext> continuous(const WeightedHypergraph& graph, const NoiseModel& noise,
                                                             std::optional<CVModelKind> kind = std::nullopt);
  int n() const { return graph.vertexCount(); }
};

class ProverDevice {
 public:
  ProverDevice(std::shared_ptr<const SimulationContext> context, const RegisterAssignment& assignment,
               std::uint64_t seed, std::uint32_t trial);

  /// Registers must be taken in increasing id order, each exactly once.
  void beginRegister(RegisterId id);
  /// Sites strictly increasing within a register; Discard returns monostate.
  Outcome measure(Vertex site, Basis basis);
  void endRegister();

  RegisterId currentRegister() const { return current_; }

 private:
  void materialize();

  std::shared_ptr<const SimulationContext> ctx_;
  const RegisterAssignment& assignment_;
  std::uint64_t seed_;
  std::uint32_t trial_;

  RegisterId current_ = 0;
  Vertex lastSite_ = 0;
  bool open_ = false;
  bool live_ = false;  // state built for the current register
  std::optional<Rng> rng_;
  std::optional<StabilizerTableau> tableau_;
  std::optional<DenseState> dense_;
  std::optional<CVRegisterModel> cvModel_;
  std::optional<CVRegisterSampler> sampler_;
};

}  // namespace gsv
