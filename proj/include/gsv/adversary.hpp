#pragma once

// Prover strategies. Each produces the full N_total-register state model
// before the verifier draws any randomness, and sees only public parameters.
// Entries are graph-basis states (ideal, Z-deviated, Weyl-shifted) or small
// explicit stabilizer states; cross-register correlations are classical.

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gsv/graph.hpp"
#include "gsv/qudit.hpp"
#include "gsv/tableau.hpp"

namespace gsv {

using RegisterId = std::int64_t;  // 1-based

struct IdealRegister {
  bool operator==(const IdealRegister&) const = default;
};
struct DeviatedRegister {
  DeviationVector a;
  bool operator==(const DeviatedRegister&) const = default;
};
struct ShiftedRegister {
  std::vector<double> shifts;
  bool operator==(const ShiftedRegister&) const = default;
};
struct TableauRegister {
  std::shared_ptr<const StabilizerTableau> state;
  bool operator==(const TableauRegister& o) const { return state == o.state; }
};

using RegisterState = std::variant<IdealRegister, DeviatedRegister, ShiftedRegister, TableauRegister>;

/// What a strategy is allowed to know.
struct PublicParams {
  int n = 0;
  std::optional<int> d;  // nullopt for CV
  RegisterId nTotal = 0;
  std::uint64_t correlationSeed = 0;

  bool isCV() const { return !d.has_value(); }
};

struct RegisterAssignment {
  std::vector<RegisterState> perRegister;  // index = id - 1
  std::uint64_t correlationSeed = 0;
  std::string strategy;

  RegisterId size() const { return static_cast<RegisterId>(perRegister.size()); }
  const RegisterState& at(RegisterId id) const { return perRegister.at(static_cast<std::size_t>(id - 1)); }
};

/// Distribution eta of a bad register.
class DeviationDistribution {
 public:
  static DeviationDistribution fixed(RegisterState state);
  /// Uniform over a != 0 in Z_d^n.
  static DeviationDistribution uniformNonzero(int n, int d);

  RegisterState sample(Rng& rng) const;

 private:
  enum class Kind { Fixed, UniformNonzero };
  Kind kind_ = Kind::Fixed;
  RegisterState fixed_;
  int n_ = 0;
  int d_ = 2;
};

RegisterAssignment honest(const PublicParams& params);
/// Each register independently ideal w.p. 1 - epsilon, else a draw from eta.
RegisterAssignment iidNoise(const PublicParams& params, double epsilon, const DeviationDistribution& bad);
/// Exactly one register is `bad`; position fixed (1-based) or uniform.
RegisterAssignment singleBadRegister(const PublicParams& params, RegisterState bad,
                                     std::optional<RegisterId> position = std::nullopt);
/// One line per register: `ideal` | `dev a1,...,an` | `shift s1,...,sn`.
RegisterAssignment scripted(const PublicParams& params, std::istream& in);
RegisterAssignment scriptedFromFile(const PublicParams& params, const std::string& path);

std::string formatRegisterState(const RegisterState& state);
RegisterState parseRegisterState(const PublicParams& params, const std::string& line);

/// <G|rho|G> of a single register state.
double registerFidelity(const RegisterState& state, const WeightedHypergraph& graph);

/// Throws if an entry does not fit the register shape or mode.
void validateAssignment(const PublicParams& params, const RegisterAssignment& assignment);

}  // namespace gsv
