#pragma once

// Stabilizer tableau over Z_d for prime d.
//
// Holds n stabilizer generators S_k (with w-phases) and n destabilizers D_k
// (phases not tracked) satisfying lambda(D_j, S_k) = delta_jk. The
// destabilizers make deterministic measurement outcomes an O(n^2) product
// instead of a Gaussian elimination.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "gsv/pauli.hpp"
#include "gsv/rng.hpp"

namespace gsv {

/// Addition/multiplication/inverse tables for Z_d, shared between copies.
struct ModTables {
  explicit ModTables(int d);
  int d;
  std::vector<std::uint8_t> add, mul, neg, inv;  // inv[0] unused
  std::uint8_t addOf(int a, int b) const { return add[static_cast<std::size_t>(a * d + b)]; }
  std::uint8_t mulOf(int a, int b) const { return mul[static_cast<std::size_t>(a * d + b)]; }
};

class StabilizerTableau {
 public:
  static constexpr int kMaxDim = 251;

  /// Builds a tableau from n commuting, independent generators on n qudits.
  /// Destabilizers are solved for; throws std::invalid_argument otherwise.
  static StabilizerTableau fromGenerators(int d, const std::vector<QuditPauli>& generators);
  /// Fast constructor when a matching destabilizer set is already known.
  static StabilizerTableau fromGeneratorsAndDestabilizers(int d, const std::vector<QuditPauli>& generators,
                                                          const std::vector<QuditPauli>& destabilizers);

  int dim() const { return d_; }
  int qudits() const { return n_; }

  QuditPauli generator(int k) const;
  QuditPauli destabilizer(int k) const;
  std::vector<QuditPauli> generators() const;

  /// Applies Z_q^power to the state.
  void applyZPower(int qudit, int power);

  /// Outcome m means the observable acted as w^m on the post-measurement state.
  int measureX(int qudit, Rng& rng);
  int measureZ(int qudit, Rng& rng);
  /// P must satisfy P^d = I so its spectrum is {w^m}.
  int measurePauli(const QuditPauli& p, Rng& rng);

  /// Outcome of measuring P if it is determined by the state.
  std::optional<int> deterministicOutcome(const QuditPauli& p) const;
  /// Post-measurement update for a chosen outcome m. If the outcome is
  /// deterministic, m must equal it.
  void collapse(const QuditPauli& p, int m);

  /// Stabilizers commute pairwise and lambda(D_j, S_k) = delta_jk.
  bool isConsistent() const;

 private:
  StabilizerTableau(int d, int n);

  struct Sparse {
    std::vector<int> qudits;
    std::vector<std::uint8_t> xs, zs;
    int phase = 0;
  };
  static Sparse toSparse(const QuditPauli& p);
  Sparse singleQudit(int qudit, bool isX) const;

  int measureSparse(const Sparse& p, Rng& rng);
  std::optional<int> deterministicSparse(const Sparse& p) const;
  void collapseSparse(const Sparse& p, int m);

  std::uint8_t* rx(int row) { return x_.data() + static_cast<std::size_t>(row) * n_; }
  std::uint8_t* rz(int row) { return z_.data() + static_cast<std::size_t>(row) * n_; }
  const std::uint8_t* rx(int row) const { return x_.data() + static_cast<std::size_t>(row) * n_; }
  const std::uint8_t* rz(int row) const { return z_.data() + static_cast<std::size_t>(row) * n_; }
  int lambdaRow(int row, const Sparse& p) const;
  // stabilizer row q <- S_q * S_p (exact phase)
  void multiplyStabilizer(int q, int p);
  // destabilizer row j <- D_j + t * S_p (vectors only)
  void addScaledToDestabilizer(int j, int p, int t);

  int d_ = 2;
  int n_ = 0;
  std::shared_ptr<const ModTables> mod_;
  // rows [0, n) destabilizers, rows [n, 2n) stabilizers
  std::vector<std::uint8_t> x_, z_;
  std::vector<int> phase_;  // stabilizer phases, size n
};

}  // namespace gsv
