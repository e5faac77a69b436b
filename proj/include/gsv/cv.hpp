#pragma once

// Continuous-variable stabilizer test on weighted hypergraph states.
//
// Test for g_i: homodyne p on mode i and x on every mode sharing a hyperedge
// with i, then residual = p_i - sum_{e_j in E(i)} Omega_j prod x_k. Finite
// precision is modeled by a residual tolerance tau and two Gaussian noise
// sources; tau = 0 with both sigmas 0 is the exact (symbolic) idealization.
//
// Units: hbar = 1, [x, p] = i, vacuum quadrature variance 1/2.

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gsv/dense.hpp"
#include "gsv/graph.hpp"
#include "gsv/rng.hpp"

namespace gsv {

struct NoiseModel {
  double squeezeSigma = 0.0;  // std-dev of each nullifier from finite squeezing
  double measSigma = 0.0;     // homodyne detector noise per outcome
  double xWindow = 10.0;      // half-width of the uniform x window (nullifier sampling)

  void validate() const;
  bool symbolic() const { return squeezeSigma == 0.0 && measSigma == 0.0; }
};

/// Gaussian state, quadratures ordered (x_1..x_n, p_1..p_n).
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int modes() const { return static_cast<int>(mean.size() / 2); }
  /// V + (i/2) Omega >= 0, smallest eigenvalue checked against -tolerance.
  bool satisfiesUncertainty(double tolerance = 1e-9) const;
};

/// CZ(Omega) symplectic transforms applied to n p-squeezed vacua with
/// p-variance squeezeSigma^2 (x-variance 1/(4 squeezeSigma^2)).
GaussianState prepareCVGraphState(const WeightedHypergraph& graph, double squeezeSigma);

struct CVSiteOutcome {
  Vertex vertex = 0;
  Basis basis = Basis::Discard;
  double value = 0.0;
  bool operator==(const CVSiteOutcome&) const = default;
};

struct CVTestOutcome {
  Vertex vertex = 0;
  double residual = 0.0;
  bool passed = false;
  std::vector<CVSiteOutcome> rawOutcomes;
  bool operator==(const CVTestOutcome&) const = default;
};

enum class CVModelKind { Gaussian, Nullifier };

/// Honest CV register, optionally displaced by prod_i Z_i(s_i) = e^{i s_i x_i}.
/// Gaussian: exact covariance state (plain graphs, squeezeSigma > 0).
/// Nullifier: x_k uniform on the window, p_i drawn from the nullifier identity.
class CVRegisterModel {
 public:
  static CVRegisterModel gaussian(const WeightedHypergraph& graph, const NoiseModel& noise,
                                  std::vector<double> shifts = {});
  static CVRegisterModel nullifier(const WeightedHypergraph& graph, const NoiseModel& noise,
                                   std::vector<double> shifts = {});
  /// Gaussian when the graph is plain and squeezeSigma > 0, otherwise nullifier sampling.
  static CVRegisterModel automatic(const WeightedHypergraph& graph, const NoiseModel& noise,
                                   std::vector<double> shifts = {});

  CVRegisterModel withShifts(std::vector<double> shifts) const;

  CVModelKind kind() const { return kind_; }
  int modes() const { return n_; }
  const NoiseModel& noise() const { return noise_; }
  const std::vector<double>& shifts() const { return shifts_; }
  const GaussianState* gaussianState() const { return gaussian_.get(); }
  const std::vector<CVNullifierSpec>& nullifiers() const { return *nullifiers_; }

 private:
  CVRegisterModel() = default;

  CVModelKind kind_ = CVModelKind::Nullifier;
  int n_ = 0;
  NoiseModel noise_;
  std::vector<double> shifts_;
  std::shared_ptr<const GaussianState> gaussian_;  // unshifted
  std::shared_ptr<const std::vector<CVNullifierSpec>> nullifiers_;
};

/// Honest model for prod Z_i(s_i)|G_CV>; the residual of nullifier i has mean s_i.
CVRegisterModel cvDeviationModel(const WeightedHypergraph& graph, std::vector<double> shifts, const NoiseModel& noise,
                                 std::optional<CVModelKind> kind = std::nullopt);

/// Sequential homodyne sampler for one register. Each call samples the
/// requested quadrature conditioned on everything measured before it, so a
/// site-by-site session reproduces the joint marginal exactly.
class CVRegisterSampler {
 public:
  CVRegisterSampler(const CVRegisterModel& model, Rng& rng);
  /// basis must be Amplitude (x) or Phase (p); vertex is 1-based.
  double measure(Vertex vertex, Basis basis);

 private:
  const CVRegisterModel& model_;
  Rng& rng_;
  // Gaussian mode: incremental Cholesky of the measured marginal.
  std::vector<int> measured_;
  std::vector<std::vector<double>> cholesky_;
  std::vector<double> normals_;
  // Nullifier mode: the register's x values, drawn up front.
  std::vector<double> x_;
};

/// Sites measured by the test for g_i in ascending vertex order.
std::vector<std::pair<Vertex, Basis>> testSites(const CVNullifierSpec& spec);
CVTestOutcome scoreTest(const CVNullifierSpec& spec, int modes, double tau, std::vector<CVSiteOutcome> raw);

/// Requires tau >= 0, and tau = 0 only in symbolic mode.
CVTestOutcome runCVStabilizerTest(const CVRegisterModel& model, const CVNullifierSpec& spec, double tau, Rng& rng);

struct ResidualMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Analytic residual moments from the covariance (Gaussian mode).
ResidualMoments gaussianResidualMoments(const CVRegisterModel& model, const CVNullifierSpec& spec);
/// Analytic residual moments of the nullifier-sampling model (|e| = 2 terms).
ResidualMoments nullifierResidualMoments(const CVRegisterModel& model, const CVNullifierSpec& spec);

/// P(|R| <= tau) for R ~ N(mean, variance); variance 0 gives the indicator.
double gaussianPassProbability(ResidualMoments moments, double tau);

}  // namespace gsv
