#pragma once

// Generalized Pauli operators on n qudits of dimension d.
//
// Convention (fixed repository-wide):
//   X|k> = |k+1 mod d>,  Z|k> = w^k |k>,  w = exp(2 pi i / d),  so  ZX = w XZ.
// A QuditPauli stores  w^phase * prod_q X_q^{x_q} Z_q^{z_q}  with X to the
// left of Z on every qudit. All exponents are reduced into [0, d).

#include <cstdint>
#include <string>
#include <vector>

namespace gsv {

bool isPrime(int d);

/// Reduces v into [0, d).
inline int modd(long long v, int d) {
  const long long r = v % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

/// Modular inverse for a unit of Z_d; throws if a is not invertible.
int invMod(int a, int d);

class QuditPauli {
 public:
  QuditPauli() = default;
  /// Identity on n qudits.
  QuditPauli(int d, int n);
  QuditPauli(int d, std::vector<int> xExponents, std::vector<int> zExponents, int phaseExponent = 0);

  static QuditPauli X(int d, int n, int qudit, int power = 1);
  static QuditPauli Z(int d, int n, int qudit, int power = 1);

  int dim() const { return d_; }
  int size() const { return static_cast<int>(x_.size()); }
  const std::vector<int>& xExponents() const { return x_; }
  const std::vector<int>& zExponents() const { return z_; }
  int phaseExponent() const { return phase_; }
  void setPhaseExponent(int p) { phase_ = modd(p, d_); }

  bool isIdentityUpToPhase() const;

  /// this <- this * rhs, tracking the w-phase exactly.
  QuditPauli& operator*=(const QuditPauli& rhs);
  friend QuditPauli operator*(QuditPauli lhs, const QuditPauli& rhs) { return lhs *= rhs; }
  QuditPauli pow(int k) const;

  /// Symplectic form lambda(P, Q) = x_P . z_Q - z_P . x_Q  (mod d).
  /// P Q = w^{-lambda(P,Q)} Q P, so the two commute iff the form vanishes.
  int symplectic(const QuditPauli& other) const;
  bool commutesWith(const QuditPauli& other) const { return symplectic(other) == 0; }

  bool operator==(const QuditPauli&) const = default;

  /// e.g. "w^1 X1 Z2^2" with 1-based qudit labels.
  std::string toString() const;

 private:
  int d_ = 2;
  std::vector<int> x_;
  std::vector<int> z_;
  int phase_ = 0;
};

}  // namespace gsv
