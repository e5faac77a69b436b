#include "gsv/pauli.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gsv {

bool isPrime(int d) {
  if (d < 2) return false;
  for (int f = 2; f * f <= d; ++f)
    if (d % f == 0) return false;
  return true;
}

int invMod(int a, int d) {
  // Extended Euclid on (a, d).
  long long r0 = d, r1 = modd(a, d), s0 = 0, s1 = 1;
  while (r1 != 0) {
    const long long q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  if (r0 != 1) throw std::domain_error("invMod: " + std::to_string(a) + " is not a unit mod " + std::to_string(d));
  return modd(s0, d);
}

QuditPauli::QuditPauli(int d, int n) : d_(d), x_(static_cast<std::size_t>(n), 0), z_(static_cast<std::size_t>(n), 0) {
  if (d < 2) throw std::invalid_argument("QuditPauli: d must be >= 2");
}

QuditPauli::QuditPauli(int d, std::vector<int> xExponents, std::vector<int> zExponents, int phaseExponent)
    : d_(d), x_(std::move(xExponents)), z_(std::move(zExponents)), phase_(modd(phaseExponent, d)) {
  if (d < 2) throw std::invalid_argument("QuditPauli: d must be >= 2");
  if (x_.size() != z_.size()) throw std::invalid_argument("QuditPauli: x/z length mismatch");
  for (auto& v : x_) v = modd(v, d);
  for (auto& v : z_) v = modd(v, d);
}

QuditPauli QuditPauli::X(int d, int n, int qudit, int power) {
  QuditPauli p(d, n);
  p.x_.at(static_cast<std::size_t>(qudit)) = modd(power, d);
  return p;
}

QuditPauli QuditPauli::Z(int d, int n, int qudit, int power) {
  QuditPauli p(d, n);
  p.z_.at(static_cast<std::size_t>(qudit)) = modd(power, d);
  return p;
}

bool QuditPauli::isIdentityUpToPhase() const {
  return std::all_of(x_.begin(), x_.end(), [](int v) { return v == 0; }) &&
         std::all_of(z_.begin(), z_.end(), [](int v) { return v == 0; });
}

QuditPauli& QuditPauli::operator*=(const QuditPauli& rhs) {
  if (rhs.d_ != d_ || rhs.size() != size()) throw std::invalid_argument("QuditPauli: shape mismatch in product");
  // (X^a Z^b)(X^c Z^e) = w^{b c} X^{a+c} Z^{b+e}
  long long phase = phase_ + rhs.phase_;
  for (std::size_t q = 0; q < x_.size(); ++q) {
    phase += static_cast<long long>(z_[q]) * rhs.x_[q];
    x_[q] = modd(x_[q] + rhs.x_[q], d_);
    z_[q] = modd(z_[q] + rhs.z_[q], d_);
  }
  phase_ = modd(phase, d_);
  return *this;
}

QuditPauli QuditPauli::pow(int k) const {
  // P^d = I for odd d; even d can need 2d because of the w^{d(d-1)/2} phase.
  const int order = d_ % 2 == 0 ? 2 * d_ : d_;
  QuditPauli out(d_, size());
  for (int i = 0; i < modd(k, order); ++i) out *= *this;
  return out;
}

int QuditPauli::symplectic(const QuditPauli& other) const {
  long long acc = 0;
  for (std::size_t q = 0; q < x_.size(); ++q)
    acc += static_cast<long long>(x_[q]) * other.z_[q] - static_cast<long long>(z_[q]) * other.x_[q];
  return modd(acc, d_);
}

std::string QuditPauli::toString() const {
  std::ostringstream os;
  os << "w^" << phase_;
  for (std::size_t q = 0; q < x_.size(); ++q) {
    if (x_[q]) os << " X" << q + 1 << (x_[q] > 1 ? "^" + std::to_string(x_[q]) : "");
    if (z_[q]) os << " Z" << q + 1 << (z_[q] > 1 ? "^" + std::to_string(z_[q]) : "");
  }
  return os.str();
}

}  // namespace gsv
