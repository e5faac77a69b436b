#include "gsv/cv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace gsv {

void NoiseModel::validate() const {
  if (!(squeezeSigma >= 0.0) || !(measSigma >= 0.0) || !(xWindow >= 0.0))
    throw std::invalid_argument("NoiseModel: sigmas and window must be non-negative");
}

bool GaussianState::satisfiesUncertainty(double tolerance) const {
  const int n = modes();
  Eigen::MatrixXcd m = covariance.cast<std::complex<double>>();
  const std::complex<double> half_i(0.0, 0.5);
  for (int k = 0; k < n; ++k) {
    m(k, n + k) += half_i;
    m(n + k, k) -= half_i;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tolerance;
}

GaussianState prepareCVGraphState(const WeightedHypergraph& graph, double squeezeSigma) {
  if (!graph.isPlainGraph()) throw std::invalid_argument("prepareCVGraphState: every edge must have two vertices");
  if (!(squeezeSigma > 0.0)) throw std::invalid_argument("prepareCVGraphState: squeezeSigma must be positive");
  const int n = graph.vertexCount();
  Eigen::MatrixXd v0 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const double varP = squeezeSigma * squeezeSigma;
  for (int k = 0; k < n; ++k) {
    v0(k, k) = 0.25 / varP;
    v0(n + k, n + k) = varP;
  }
  // Heisenberg action of CZ(W) = exp(i W x_a x_b): p_a -> p_a + W x_b, p_b -> p_b + W x_a.
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (const auto& e : graph.edges()) {
    const int a = e.vertices[0] - 1;
    const int b = e.vertices[1] - 1;
    s(n + a, b) += e.weight;
    s(n + b, a) += e.weight;
  }
  GaussianState state;
  state.mean = Eigen::VectorXd::Zero(2 * n);
  state.covariance = s * v0 * s.transpose();
  return state;
}

CVRegisterModel CVRegisterModel::gaussian(const WeightedHypergraph& graph, const NoiseModel& noise,
                                          std::vector<double> shifts) {
  noise.validate();
  CVRegisterModel m;
  m.kind_ = CVModelKind::Gaussian;
  m.n_ = graph.vertexCount();
  m.noise_ = noise;
  m.gaussian_ = std::make_shared<const GaussianState>(prepareCVGraphState(graph, noise.squeezeSigma));
  m.nullifiers_ = std::make_shared<const std::vector<CVNullifierSpec>>(buildNullifiers(graph));
  return m.withShifts(std::move(shifts));
}

CVRegisterModel CVRegisterModel::nullifier(const WeightedHypergraph& graph, const NoiseModel& noise,
                                           std::vector<double> shifts) {
  noise.validate();
  CVRegisterModel m;
  m.kind_ = CVModelKind::Nullifier;
  m.n_ = graph.vertexCount();
  m.noise_ = noise;
  m.nullifiers_ = std::make_shared<const std::vector<CVNullifierSpec>>(buildNullifiers(graph));
  return m.withShifts(std::move(shifts));
}

CVRegisterModel CVRegisterModel::automatic(const WeightedHypergraph& graph, const NoiseModel& noise,
                                           std::vector<double> shifts) {
  if (graph.isPlainGraph() && noise.squeezeSigma > 0.0) return gaussian(graph, noise, std::move(shifts));
  return nullifier(graph, noise, std::move(shifts));
}

CVRegisterModel CVRegisterModel::withShifts(std::vector<double> shifts) const {
  if (shifts.empty()) shifts.assign(static_cast<std::size_t>(n_), 0.0);
  if (static_cast<int>(shifts.size()) != n_) throw std::invalid_argument("CV model: shift vector length mismatch");
  CVRegisterModel copy = *this;
  copy.shifts_ = std::move(shifts);
  return copy;
}

CVRegisterModel cvDeviationModel(const WeightedHypergraph& graph, std::vector<double> shifts, const NoiseModel& noise,
                                 std::optional<CVModelKind> kind) {
  if (static_cast<int>(shifts.size()) != graph.vertexCount())
    throw std::invalid_argument("cvDeviationModel: shift vector length mismatch");
  if (!kind) return CVRegisterModel::automatic(graph, noise, std::move(shifts));
  if (*kind == CVModelKind::Gaussian) return CVRegisterModel::gaussian(graph, noise, std::move(shifts));
  return CVRegisterModel::nullifier(graph, noise, std::move(shifts));
}

CVRegisterSampler::CVRegisterSampler(const CVRegisterModel& model, Rng& rng) : model_(model), rng_(rng) {
  if (model_.kind() == CVModelKind::Nullifier) {
    const double w = model_.noise().xWindow;
    x_.resize(static_cast<std::size_t>(model_.modes()));
    for (auto& v : x_) v = rng_.uniform(-w, w);
  }
}

double CVRegisterSampler::measure(Vertex vertex, Basis basis) {
  const int n = model_.modes();
  if (vertex < 1 || vertex > n) throw std::out_of_range("CV measure: vertex out of range");
  if (basis != Basis::Amplitude && basis != Basis::Phase) throw std::invalid_argument("CV measure: basis must be x or p");
  const auto k = static_cast<std::size_t>(vertex - 1);
  const NoiseModel& noise = model_.noise();
  double value = 0.0;

  if (model_.kind() == CVModelKind::Gaussian) {
    const GaussianState& g = *model_.gaussianState();
    const int q = basis == Basis::Amplitude ? vertex - 1 : n + vertex - 1;
    // New Cholesky row of the marginal over (measured..., q).
    const std::size_t m = measured_.size();
    std::vector<double> row(m + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = g.covariance(q, measured_[j]);
      for (std::size_t t = 0; t < j; ++t) acc -= row[t] * cholesky_[j][t];
      row[j] = cholesky_[j][j] > 0.0 ? acc / cholesky_[j][j] : 0.0;
    }
    double diag = g.covariance(q, q);
    for (std::size_t t = 0; t < m; ++t) diag -= row[t] * row[t];
    row[m] = std::sqrt(std::max(diag, 0.0));
    const double z = rng_.normal();
    value = g.mean(q) + (basis == Basis::Phase ? model_.shifts()[k] : 0.0) + row[m] * z;
    for (std::size_t t = 0; t < m; ++t) value += row[t] * normals_[t];
    measured_.push_back(q);
    cholesky_.push_back(std::move(row));
    normals_.push_back(z);
  } else if (basis == Basis::Amplitude) {
    value = x_[k];
  } else {
    const double squeeze = noise.squeezeSigma * rng_.normal();
    value = model_.nullifiers()[k].interaction(x_) + model_.shifts()[k] + squeeze;
  }
  return value + noise.measSigma * rng_.normal();
}

std::vector<std::pair<Vertex, Basis>> testSites(const CVNullifierSpec& spec) {
  std::vector<std::pair<Vertex, Basis>> sites;
  sites.emplace_back(spec.vertex, Basis::Phase);
  for (Vertex k : spec.amplitudeModes()) sites.emplace_back(k, Basis::Amplitude);
  std::sort(sites.begin(), sites.end());
  return sites;
}

CVTestOutcome scoreTest(const CVNullifierSpec& spec, int modes, double tau, std::vector<CVSiteOutcome> raw) {
  std::vector<double> x(static_cast<std::size_t>(modes), 0.0);
  double p = 0.0;
  for (const auto& s : raw) {
    if (s.basis == Basis::Amplitude) x[static_cast<std::size_t>(s.vertex - 1)] = s.value;
    if (s.basis == Basis::Phase) p = s.value;
  }
  CVTestOutcome out;
  out.vertex = spec.vertex;
  out.residual = p - spec.interaction(x);
  out.passed = std::abs(out.residual) <= tau;
  out.rawOutcomes = std::move(raw);
  return out;
}

CVTestOutcome runCVStabilizerTest(const CVRegisterModel& model, const CVNullifierSpec& spec, double tau, Rng& rng) {
  if (tau < 0.0) throw std::invalid_argument("runCVStabilizerTest: tau must be non-negative");
  if (tau == 0.0 && !model.noise().symbolic())
    throw std::invalid_argument("runCVStabilizerTest: tau = 0 requires the noiseless symbolic mode");
  if (spec.vertex < 1 || spec.vertex > model.modes())
    throw std::invalid_argument("runCVStabilizerTest: nullifier vertex outside the state");
  for (Vertex k : spec.amplitudeModes())
    if (k < 1 || k > model.modes()) throw std::invalid_argument("runCVStabilizerTest: nullifier mode outside the state");
  CVRegisterSampler sampler(model, rng);
  std::vector<CVSiteOutcome> raw;
  for (const auto& [v, b] : testSites(spec)) raw.push_back({v, b, sampler.measure(v, b)});
  return scoreTest(spec, model.modes(), tau, std::move(raw));
}

ResidualMoments gaussianResidualMoments(const CVRegisterModel& model, const CVNullifierSpec& spec) {
  if (model.kind() != CVModelKind::Gaussian) throw std::invalid_argument("gaussianResidualMoments: Gaussian model required");
  const GaussianState& g = *model.gaussianState();
  const int n = model.modes();
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(2 * n);
  coeff(n + spec.vertex - 1) = 1.0;
  double measured = 1.0;  // one detector noise term per measured quadrature, weighted by coefficient^2
  for (const auto& t : spec.terms) {
    if (t.factors.size() != 1) throw std::invalid_argument("gaussianResidualMoments: edge terms only");
    coeff(t.factors[0] - 1) -= t.weight;
  }
  for (Vertex k : spec.amplitudeModes()) measured += coeff(k - 1) * coeff(k - 1);
  ResidualMoments out;
  out.mean = coeff.dot(g.mean) + model.shifts()[static_cast<std::size_t>(spec.vertex - 1)];
  const double meas = model.noise().measSigma;
  out.variance = coeff.dot(g.covariance * coeff) + meas * meas * measured;
  return out;
}

ResidualMoments nullifierResidualMoments(const CVRegisterModel& model, const CVNullifierSpec& spec) {
  double weights = 0.0;
  std::vector<double> perMode(static_cast<std::size_t>(model.modes()), 0.0);
  for (const auto& t : spec.terms) {
    if (t.factors.size() != 1) throw std::invalid_argument("nullifierResidualMoments: edge terms only");
    perMode[static_cast<std::size_t>(t.factors[0] - 1)] += t.weight;
  }
  for (double w : perMode) weights += w * w;
  const auto& noise = model.noise();
  ResidualMoments out;
  out.mean = model.shifts()[static_cast<std::size_t>(spec.vertex - 1)];
  out.variance = noise.squeezeSigma * noise.squeezeSigma + noise.measSigma * noise.measSigma * (1.0 + weights);
  return out;
}

double gaussianPassProbability(ResidualMoments moments, double tau) {
  if (moments.variance <= 0.0) return std::abs(moments.mean) <= tau ? 1.0 : 0.0;
  const double s = std::sqrt(2.0 * moments.variance);
  return 0.5 * (std::erf((tau - moments.mean) / s) - std::erf((-tau - moments.mean) / s));
}

}  // namespace gsv
