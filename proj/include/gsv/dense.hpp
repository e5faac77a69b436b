#pragma once

// Dense statevector over d^n amplitudes. Serves as the independent oracle
// for the tableau and as the simulation path for composite d.
// Basis index = sum_q k_q d^q (qudit 0 is the least significant digit).

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "gsv/graph.hpp"
#include "gsv/rng.hpp"

namespace gsv {

enum class Basis { X, Z, Amplitude, Phase, Discard };

const char* basisName(Basis b);
Basis basisFromName(const std::string& name);

class DenseState {
 public:
  static constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 20;

  /// |+_d>^n; throws std::length_error when d^n exceeds 2^20.
  DenseState(int d, int n);
  /// prod_{(i,j) in E} CZ_ij |+_d>^n, built amplitude by amplitude.
  static DenseState graphState(const WeightedHypergraph& graph, int d);

  int dim() const { return d_; }
  int qudits() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  void applyCZ(int a, int b);
  void applyZPower(int qudit, int power);

  /// Outcome m: eigenvalue w^m of X (or Z). Samples and collapses.
  int measure(int qudit, Basis basis, Rng& rng);

  /// Exact joint outcome distribution of single-qudit X/Z measurements on
  /// the listed qudits (no collapse). Keys list outcomes in input order.
  std::map<std::vector<int>, double> jointDistribution(const std::vector<std::pair<int, Basis>>& sites) const;

  double norm() const;
  std::complex<double> overlap(const DenseState& other) const;

 private:
  std::vector<double> marginal(int qudit, Basis basis) const;
  void project(int qudit, Basis basis, int outcome);
  int digit(std::size_t index, int qudit) const;

  int d_;
  int n_;
  std::vector<std::size_t> stride_;
  std::vector<std::complex<double>> omega_;  // w^j, j in [0, d)
  std::vector<std::complex<double>> amp_;
};

}  // namespace gsv
