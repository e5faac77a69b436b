#include "gsv/dense.hpp"

#include "gsv/pauli.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gsv {

const char* basisName(Basis b) {
  switch (b) {
    case Basis::X: return "X";
    case Basis::Z: return "Z";
    case Basis::Amplitude: return "x";
    case Basis::Phase: return "p";
    case Basis::Discard: return "discard";
  }
  return "?";
}

Basis basisFromName(const std::string& name) {
  if (name == "X") return Basis::X;
  if (name == "Z") return Basis::Z;
  if (name == "x") return Basis::Amplitude;
  if (name == "p") return Basis::Phase;
  if (name == "discard") return Basis::Discard;
  throw std::invalid_argument("unknown basis '" + name + "'");
}

namespace {

// In-place change of basis on one qudit:
// forward: a'[m] = d^{-1/2} sum_k w^{mk} a[k]   (coefficients in the X eigenbasis)
// inverse: a[k]  = d^{-1/2} sum_m w^{-mk} a'[m]
void fourier(std::vector<std::complex<double>>& amp, int d, std::size_t stride,
             const std::vector<std::complex<double>>& omega, bool inverse) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const std::size_t block = stride * static_cast<std::size_t>(d);
  std::vector<std::complex<double>> in(static_cast<std::size_t>(d));
  for (std::size_t base = 0; base < amp.size(); base += block) {
    for (std::size_t low = 0; low < stride; ++low) {
      for (int k = 0; k < d; ++k) in[static_cast<std::size_t>(k)] = amp[base + low + static_cast<std::size_t>(k) * stride];
      for (int m = 0; m < d; ++m) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < d; ++k) {
          const int e = inverse ? modd(-m * k, d) : (m * k) % d;
          acc += omega[static_cast<std::size_t>(e)] * in[static_cast<std::size_t>(k)];
        }
        amp[base + low + static_cast<std::size_t>(m) * stride] = acc * scale;
      }
    }
  }
}

}  // namespace

DenseState::DenseState(int d, int n) : d_(d), n_(n) {
  if (d < 2 || n < 1) throw std::invalid_argument("DenseState: need d >= 2 and n >= 1");
  std::size_t size = 1;
  for (int q = 0; q < n; ++q) {
    stride_.push_back(size);
    if (size > kMaxAmplitudes / static_cast<std::size_t>(d))
      throw std::length_error("DenseState: d^n exceeds the 2^20 amplitude limit");
    size *= static_cast<std::size_t>(d);
  }
  for (int j = 0; j < d; ++j) omega_.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / d));
  amp_.assign(size, std::complex<double>(1.0 / std::sqrt(static_cast<double>(size)), 0.0));
}

DenseState DenseState::graphState(const WeightedHypergraph& graph, int d) {
  if (!graph.isPlainGraph()) throw std::invalid_argument("DenseState::graphState: plain graph required");
  for (const auto& e : graph.edges())
    if (e.weight != 1.0) throw std::invalid_argument("DenseState::graphState: edges must have weight 1");
  DenseState s(d, graph.vertexCount());
  for (const auto& e : graph.edges()) s.applyCZ(e.vertices[0] - 1, e.vertices[1] - 1);
  return s;
}

int DenseState::digit(std::size_t index, int qudit) const {
  return static_cast<int>((index / stride_[static_cast<std::size_t>(qudit)]) % static_cast<std::size_t>(d_));
}

void DenseState::applyCZ(int a, int b) {
  for (std::size_t i = 0; i < amp_.size(); ++i)
    amp_[i] *= omega_[static_cast<std::size_t>((digit(i, a) * digit(i, b)) % d_)];
}

void DenseState::applyZPower(int qudit, int power) {
  const int a = modd(power, d_);
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] *= omega_[static_cast<std::size_t>((a * digit(i, qudit)) % d_)];
}

std::vector<double> DenseState::marginal(int qudit, Basis basis) const {
  std::vector<std::complex<double>> work = amp_;
  if (basis == Basis::X) fourier(work, d_, stride_[static_cast<std::size_t>(qudit)], omega_, false);
  std::vector<double> p(static_cast<std::size_t>(d_), 0.0);
  for (std::size_t i = 0; i < work.size(); ++i) p[static_cast<std::size_t>(digit(i, qudit))] += std::norm(work[i]);
  return p;
}

void DenseState::project(int qudit, Basis basis, int outcome) {
  const std::size_t stride = stride_[static_cast<std::size_t>(qudit)];
  if (basis == Basis::X) fourier(amp_, d_, stride, omega_, false);
  double kept = 0.0;
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    if (digit(i, qudit) != outcome)
      amp_[i] = 0.0;
    else
      kept += std::norm(amp_[i]);
  }
  const double scale = 1.0 / std::sqrt(kept);
  for (auto& a : amp_) a *= scale;
  if (basis == Basis::X) fourier(amp_, d_, stride, omega_, true);
}

int DenseState::measure(int qudit, Basis basis, Rng& rng) {
  if (qudit < 0 || qudit >= n_) throw std::out_of_range("DenseState::measure: qudit out of range");
  if (basis != Basis::X && basis != Basis::Z) throw std::invalid_argument("DenseState::measure: X or Z only");
  const auto p = marginal(qudit, basis);
  double u = rng.uniform01();
  int outcome = d_ - 1;
  for (int m = 0; m < d_; ++m) {
    if (u < p[static_cast<std::size_t>(m)]) {
      outcome = m;
      break;
    }
    u -= p[static_cast<std::size_t>(m)];
  }
  // Guard against landing on a zero-probability tail through round-off.
  while (p[static_cast<std::size_t>(outcome)] <= 1e-15 && outcome > 0) --outcome;
  project(qudit, basis, outcome);
  return outcome;
}

std::map<std::vector<int>, double> DenseState::jointDistribution(const std::vector<std::pair<int, Basis>>& sites) const {
  std::vector<std::complex<double>> work = amp_;
  for (const auto& [q, b] : sites) {
    if (q < 0 || q >= n_) throw std::out_of_range("jointDistribution: qudit out of range");
    if (b == Basis::X) fourier(work, d_, stride_[static_cast<std::size_t>(q)], omega_, false);
    else if (b != Basis::Z) throw std::invalid_argument("jointDistribution: X or Z only");
  }
  std::map<std::vector<int>, double> dist;
  std::vector<int> key(sites.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double p = std::norm(work[i]);
    if (p == 0.0) continue;
    for (std::size_t s = 0; s < sites.size(); ++s) key[s] = digit(i, sites[s].first);
    dist[key] += p;
  }
  return dist;
}

double DenseState::norm() const {
  double acc = 0.0;
  for (const auto& a : amp_) acc += std::norm(a);
  return std::sqrt(acc);
}

std::complex<double> DenseState::overlap(const DenseState& other) const {
  if (other.amp_.size() != amp_.size()) throw std::invalid_argument("overlap: dimension mismatch");
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < amp_.size(); ++i) acc += std::conj(amp_[i]) * other.amp_[i];
  return acc;
}

}  // namespace gsv
