#include <cmath>
#include <fstream>
#include <limits>

#include "gsv/bounds.hpp"
#include "gsv/experiment.hpp"
#include "gsv/wire.hpp"

namespace gsv {

namespace {

std::string cell(double v) { return std::isfinite(v) ? formatDecimal(v) : "nan"; }

}  // namespace

std::vector<SweepRow> evaluateSweep(const SweepGrid& grid) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows;
  for (int n : grid.ns)
    for (double c : grid.cs)
      for (int nTilde : grid.nTildes)
        for (double eps : grid.epsilons) {
          SweepRow r;
          r.n = n;
          r.c = c;
          r.epsilon = eps;
          r.nTilde = nTilde;
          r.nTest = computeNTest(n);
          r.nTotal = 2LL * n * r.nTest;
          const double nt = static_cast<double>(r.nTest);
          const double threshold = (n - 1.0 / (2.0 * n)) * nt;
          r.bound = nTilde == 1 ? certifiedFidelityBound(n, c, threshold, nt)
                                : multiCopyBound(n, c, nTilde, threshold, nt);
          r.confidence = totalConfidence(n, c).clamped;
          if (c > 64.0 / 5.0) {
            const auto m = comparisonM(n, c);
            r.M = m.M;
            r.t = m.t;
          } else {
            r.M = nan;
            r.t = 5.0 * c / 64.0;
          }
          r.pAcc = pAcc(n, r.nTest, eps);
          r.pAccPrior = r.M >= 1.0 ? pAccPrior(r.M, eps) : nan;
          auto params = ProtocolParams::standard(presets::path(n), 2, c, 0, nTilde);
          r.inRegime = params.regimeFlags().empty();
          rows.push_back(r);
        }
  return rows;
}

void writeSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "n,c,epsilon,ntilde,N_test,N_total,bound,confidence,M,t,p_acc,p_acc_prior,in_regime\n";
  for (const auto& r : rows)
    out << r.n << ',' << cell(r.c) << ',' << cell(r.epsilon) << ',' << r.nTilde << ',' << r.nTest << ',' << r.nTotal
        << ',' << cell(r.bound) << ',' << cell(r.confidence) << ',' << cell(r.M) << ',' << cell(r.t) << ','
        << cell(r.pAcc) << ',' << cell(r.pAccPrior) << ',' << (r.inRegime ? "true" : "false") << '\n';
}

void emitSweep(const SweepGrid& grid, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  writeSweepCsv(evaluateSweep(grid), f);
}

}  // namespace gsv
