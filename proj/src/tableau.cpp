#include "gsv/tableau.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace gsv {

ModTables::ModTables(int dim) : d(dim) {
  const auto dd = static_cast<std::size_t>(d);
  add.resize(dd * dd);
  mul.resize(dd * dd);
  neg.resize(dd);
  inv.resize(dd);
  for (int a = 0; a < d; ++a) {
    neg[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(modd(-a, d));
    if (a) inv[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(invMod(a, d));
    for (int b = 0; b < d; ++b) {
      add[static_cast<std::size_t>(a * d + b)] = static_cast<std::uint8_t>((a + b) % d);
      mul[static_cast<std::size_t>(a * d + b)] = static_cast<std::uint8_t>((a * b) % d);
    }
  }
}

namespace {

std::shared_ptr<const ModTables> tablesFor(int d) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ModTables>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[d];
  if (!slot) slot = std::make_shared<const ModTables>(d);
  return slot;
}

void requirePrime(int d) {
  if (!isPrime(d) || d > StabilizerTableau::kMaxDim)
    throw std::invalid_argument("StabilizerTableau: d must be a prime <= 251, got " + std::to_string(d));
}

}  // namespace

StabilizerTableau::StabilizerTableau(int d, int n)
    : d_(d),
      n_(n),
      mod_(tablesFor(d)),
      x_(static_cast<std::size_t>(2 * n * n), 0),
      z_(static_cast<std::size_t>(2 * n * n), 0),
      phase_(static_cast<std::size_t>(n), 0) {}

StabilizerTableau StabilizerTableau::fromGeneratorsAndDestabilizers(int d, const std::vector<QuditPauli>& generators,
                                                                    const std::vector<QuditPauli>& destabilizers) {
  requirePrime(d);
  const int n = static_cast<int>(generators.size());
  if (n == 0 || destabilizers.size() != generators.size())
    throw std::invalid_argument("StabilizerTableau: need n generators and n destabilizers");
  StabilizerTableau t(d, n);
  for (int k = 0; k < n; ++k) {
    const auto& s = generators[static_cast<std::size_t>(k)];
    const auto& ds = destabilizers[static_cast<std::size_t>(k)];
    if (s.dim() != d || s.size() != n || ds.dim() != d || ds.size() != n)
      throw std::invalid_argument("StabilizerTableau: generator shape mismatch");
    for (int q = 0; q < n; ++q) {
      t.rx(k)[q] = static_cast<std::uint8_t>(ds.xExponents()[static_cast<std::size_t>(q)]);
      t.rz(k)[q] = static_cast<std::uint8_t>(ds.zExponents()[static_cast<std::size_t>(q)]);
      t.rx(n + k)[q] = static_cast<std::uint8_t>(s.xExponents()[static_cast<std::size_t>(q)]);
      t.rz(n + k)[q] = static_cast<std::uint8_t>(s.zExponents()[static_cast<std::size_t>(q)]);
    }
    t.phase_[static_cast<std::size_t>(k)] = s.phaseExponent();
  }
  if (!t.isConsistent()) throw std::invalid_argument("StabilizerTableau: generators/destabilizers are not dual");
  return t;
}

StabilizerTableau StabilizerTableau::fromGenerators(int d, const std::vector<QuditPauli>& generators) {
  requirePrime(d);
  const int n = static_cast<int>(generators.size());
  if (n == 0) throw std::invalid_argument("StabilizerTableau: empty generator list");
  for (const auto& g : generators)
    if (g.dim() != d || g.size() != n) throw std::invalid_argument("StabilizerTableau: generator shape mismatch");
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!generators[static_cast<std::size_t>(a)].commutesWith(generators[static_cast<std::size_t>(b)]))
        throw std::invalid_argument("StabilizerTableau: generators do not commute");

  // Solve lambda(D_j, S_k) = delta_jk for u = (Dx, Dz):
  //   sum_q Dx_q S_k.z_q - Dz_q S_k.x_q = delta_jk
  // by reducing [A | I] with A_k = (S_k.z, -S_k.x).
  const int cols = 2 * n;
  std::vector<std::vector<int>> m(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(cols + n), 0));
  for (int k = 0; k < n; ++k) {
    const auto& s = generators[static_cast<std::size_t>(k)];
    auto& row = m[static_cast<std::size_t>(k)];
    for (int q = 0; q < n; ++q) {
      row[static_cast<std::size_t>(q)] = s.zExponents()[static_cast<std::size_t>(q)];
      row[static_cast<std::size_t>(n + q)] = modd(-s.xExponents()[static_cast<std::size_t>(q)], d);
    }
    row[static_cast<std::size_t>(cols + k)] = 1;
  }
  std::vector<int> pivotCol;
  int rank = 0;
  for (int col = 0; col < cols && rank < n; ++col) {
    int pick = -1;
    for (int r = rank; r < n; ++r)
      if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
        pick = r;
        break;
      }
    if (pick < 0) continue;
    std::swap(m[static_cast<std::size_t>(rank)], m[static_cast<std::size_t>(pick)]);
    auto& prow = m[static_cast<std::size_t>(rank)];
    const int scale = invMod(prow[static_cast<std::size_t>(col)], d);
    for (auto& v : prow) v = modd(static_cast<long long>(v) * scale, d);
    for (int r = 0; r < n; ++r) {
      if (r == rank) continue;
      auto& row = m[static_cast<std::size_t>(r)];
      const int f = row[static_cast<std::size_t>(col)];
      if (f == 0) continue;
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = modd(row[c] - static_cast<long long>(f) * prow[c], d);
    }
    pivotCol.push_back(col);
    ++rank;
  }
  if (rank < n) throw std::invalid_argument("StabilizerTableau: generators are not independent");

  std::vector<QuditPauli> destabilizers;
  for (int j = 0; j < n; ++j) {
    std::vector<int> dx(static_cast<std::size_t>(n), 0), dz(static_cast<std::size_t>(n), 0);
    for (int r = 0; r < n; ++r) {
      const int col = pivotCol[static_cast<std::size_t>(r)];
      const int value = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols + j)];
      if (col < n)
        dx[static_cast<std::size_t>(col)] = value;
      else
        dz[static_cast<std::size_t>(col - n)] = value;
    }
    destabilizers.emplace_back(d, std::move(dx), std::move(dz));
  }
  return fromGeneratorsAndDestabilizers(d, generators, destabilizers);
}

QuditPauli StabilizerTableau::generator(int k) const {
  const int row = n_ + k;
  return QuditPauli(d_, std::vector<int>(rx(row), rx(row) + n_), std::vector<int>(rz(row), rz(row) + n_),
                    phase_.at(static_cast<std::size_t>(k)));
}

QuditPauli StabilizerTableau::destabilizer(int k) const {
  return QuditPauli(d_, std::vector<int>(rx(k), rx(k) + n_), std::vector<int>(rz(k), rz(k) + n_));
}

std::vector<QuditPauli> StabilizerTableau::generators() const {
  std::vector<QuditPauli> out;
  for (int k = 0; k < n_; ++k) out.push_back(generator(k));
  return out;
}

void StabilizerTableau::applyZPower(int qudit, int power) {
  // Z^a (X^x Z^z) Z^-a = w^{a x} X^x Z^z
  if (qudit < 0 || qudit >= n_) throw std::out_of_range("applyZPower: qudit out of range");
  const int a = modd(power, d_);
  for (int k = 0; k < n_; ++k)
    phase_[static_cast<std::size_t>(k)] = modd(phase_[static_cast<std::size_t>(k)] + a * rx(n_ + k)[qudit], d_);
}

StabilizerTableau::Sparse StabilizerTableau::toSparse(const QuditPauli& p) {
  Sparse s;
  for (int q = 0; q < p.size(); ++q) {
    const int x = p.xExponents()[static_cast<std::size_t>(q)];
    const int z = p.zExponents()[static_cast<std::size_t>(q)];
    if (x == 0 && z == 0) continue;
    s.qudits.push_back(q);
    s.xs.push_back(static_cast<std::uint8_t>(x));
    s.zs.push_back(static_cast<std::uint8_t>(z));
  }
  s.phase = p.phaseExponent();
  return s;
}

StabilizerTableau::Sparse StabilizerTableau::singleQudit(int qudit, bool isX) const {
  if (qudit < 0 || qudit >= n_) throw std::out_of_range("measure: qudit out of range");
  return Sparse{{qudit}, {static_cast<std::uint8_t>(isX ? 1 : 0)}, {static_cast<std::uint8_t>(isX ? 0 : 1)}, 0};
}

int StabilizerTableau::lambdaRow(int row, const Sparse& p) const {
  const auto* xr = rx(row);
  const auto* zr = rz(row);
  int acc = 0;
  for (std::size_t i = 0; i < p.qudits.size(); ++i) {
    const int q = p.qudits[i];
    acc += xr[q] * p.zs[i] - zr[q] * p.xs[i];
  }
  return modd(acc, d_);
}

void StabilizerTableau::multiplyStabilizer(int q, int p) {
  auto* xq = rx(n_ + q);
  auto* zq = rz(n_ + q);
  const auto* xp = rx(n_ + p);
  const auto* zp = rz(n_ + p);
  int phase = phase_[static_cast<std::size_t>(q)] + phase_[static_cast<std::size_t>(p)];
  for (int i = 0; i < n_; ++i) {
    phase += zq[i] * xp[i];
    xq[i] = mod_->addOf(xq[i], xp[i]);
    zq[i] = mod_->addOf(zq[i], zp[i]);
  }
  phase_[static_cast<std::size_t>(q)] = phase % d_;
}

void StabilizerTableau::addScaledToDestabilizer(int j, int p, int t) {
  auto* xj = rx(j);
  auto* zj = rz(j);
  const auto* xp = rx(n_ + p);
  const auto* zp = rz(n_ + p);
  for (int i = 0; i < n_; ++i) {
    xj[i] = mod_->addOf(xj[i], mod_->mulOf(t, xp[i]));
    zj[i] = mod_->addOf(zj[i], mod_->mulOf(t, zp[i]));
  }
}

std::optional<int> StabilizerTableau::deterministicSparse(const Sparse& p) const {
  for (int k = 0; k < n_; ++k)
    if (lambdaRow(n_ + k, p) != 0) return std::nullopt;
  // P ~ prod_k S_k^{c_k} with c_k = lambda(D_k, P).
  std::vector<int> ax(static_cast<std::size_t>(n_), 0), az(static_cast<std::size_t>(n_), 0);
  long long phase = 0;
  for (int k = 0; k < n_; ++k) {
    const int c = lambdaRow(k, p);
    const auto* xs = rx(n_ + k);
    const auto* zs = rz(n_ + k);
    for (int rep = 0; rep < c; ++rep) {
      phase += phase_[static_cast<std::size_t>(k)];
      for (int i = 0; i < n_; ++i) {
        phase += static_cast<long long>(az[static_cast<std::size_t>(i)]) * xs[i];
        ax[static_cast<std::size_t>(i)] = mod_->addOf(ax[static_cast<std::size_t>(i)], xs[i]);
        az[static_cast<std::size_t>(i)] = mod_->addOf(az[static_cast<std::size_t>(i)], zs[i]);
      }
    }
  }
  std::vector<int> px(static_cast<std::size_t>(n_), 0), pz(static_cast<std::size_t>(n_), 0);
  for (std::size_t i = 0; i < p.qudits.size(); ++i) {
    px[static_cast<std::size_t>(p.qudits[i])] = p.xs[i];
    pz[static_cast<std::size_t>(p.qudits[i])] = p.zs[i];
  }
  if (ax != px || az != pz) throw std::logic_error("StabilizerTableau: inconsistent tableau (P not in span)");
  // product = w^phase X^x Z^z stabilizes; P = w^{p.phase - phase} * product.
  return modd(p.phase - phase, d_);
}

void StabilizerTableau::collapseSparse(const Sparse& p, int m) {
  int pivot = -1;
  std::vector<int> r(static_cast<std::size_t>(n_), 0);
  for (int k = 0; k < n_; ++k) {
    r[static_cast<std::size_t>(k)] = lambdaRow(n_ + k, p);
    if (pivot < 0 && r[static_cast<std::size_t>(k)] != 0) pivot = k;
  }
  if (pivot < 0) {
    if (*deterministicSparse(p) != modd(m, d_))
      throw std::invalid_argument("collapse: outcome contradicts a deterministic measurement");
    return;
  }
  const int rinv = mod_->inv[static_cast<std::size_t>(r[static_cast<std::size_t>(pivot)])];
  for (int j = 0; j < n_; ++j) {
    if (j == pivot) continue;
    const int s = lambdaRow(j, p);
    if (s != 0) addScaledToDestabilizer(j, pivot, mod_->mulOf(mod_->neg[static_cast<std::size_t>(s)], rinv));
  }
  for (int q = 0; q < n_; ++q) {
    if (q == pivot || r[static_cast<std::size_t>(q)] == 0) continue;
    const int t = mod_->mulOf(mod_->neg[static_cast<std::size_t>(r[static_cast<std::size_t>(q)])], rinv);
    for (int rep = 0; rep < t; ++rep) multiplyStabilizer(q, pivot);
  }
  // D_pivot <- rinv * S_pivot, S_pivot <- w^{-m} P
  auto* dx = rx(pivot);
  auto* dz = rz(pivot);
  auto* sx = rx(n_ + pivot);
  auto* sz = rz(n_ + pivot);
  for (int i = 0; i < n_; ++i) {
    dx[i] = mod_->mulOf(rinv, sx[i]);
    dz[i] = mod_->mulOf(rinv, sz[i]);
    sx[i] = 0;
    sz[i] = 0;
  }
  for (std::size_t i = 0; i < p.qudits.size(); ++i) {
    sx[p.qudits[i]] = p.xs[i];
    sz[p.qudits[i]] = p.zs[i];
  }
  phase_[static_cast<std::size_t>(pivot)] = modd(p.phase - m, d_);
}

int StabilizerTableau::measureSparse(const Sparse& p, Rng& rng) {
  if (auto det = deterministicSparse(p)) return *det;
  const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(d_)));
  collapseSparse(p, m);
  return m;
}

int StabilizerTableau::measureX(int qudit, Rng& rng) { return measureSparse(singleQudit(qudit, true), rng); }
int StabilizerTableau::measureZ(int qudit, Rng& rng) { return measureSparse(singleQudit(qudit, false), rng); }

int StabilizerTableau::measurePauli(const QuditPauli& p, Rng& rng) {
  if (p.dim() != d_ || p.size() != n_) throw std::invalid_argument("measurePauli: shape mismatch");
  if (!p.pow(d_).isIdentityUpToPhase() || p.pow(d_).phaseExponent() != 0)
    throw std::invalid_argument("measurePauli: observable must satisfy P^d = I");
  return measureSparse(toSparse(p), rng);
}

std::optional<int> StabilizerTableau::deterministicOutcome(const QuditPauli& p) const {
  if (p.dim() != d_ || p.size() != n_) throw std::invalid_argument("deterministicOutcome: shape mismatch");
  return deterministicSparse(toSparse(p));
}

void StabilizerTableau::collapse(const QuditPauli& p, int m) {
  if (p.dim() != d_ || p.size() != n_) throw std::invalid_argument("collapse: shape mismatch");
  collapseSparse(toSparse(p), m);
}

bool StabilizerTableau::isConsistent() const {
  const auto gens = generators();
  for (int a = 0; a < n_; ++a) {
    const auto da = destabilizer(a);
    for (int b = 0; b < n_; ++b) {
      if (a < b && !gens[static_cast<std::size_t>(a)].commutesWith(gens[static_cast<std::size_t>(b)])) return false;
      if (da.symplectic(gens[static_cast<std::size_t>(b)]) != (a == b ? 1 : 0)) return false;
    }
  }
  return true;
}

}  // namespace gsv
