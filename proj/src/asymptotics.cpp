#include "symdyn/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "symdyn/errors.hpp"

namespace symdyn {

namespace {

// x <- e^{-P_Delta} L_Delta x, keeping the scaled iterate O(1).
void scaled_step(const SubsystemAnalysis& analysis, Vector& x) {
  x = analysis.restricted.apply(x);
  const double factor = std::exp(-analysis.p_delta);
  for (double& v : x) v *= factor;
}

}  // namespace

double mu_delta_n(const SubsystemAnalysis& analysis, const GibbsMeasure& measure, std::size_t n) {
  Vector x(analysis.transfer.state_count(), 1.0);
  for (std::size_t i = 0; i < n; ++i) x = analysis.restricted.apply(x);
  return integrate(measure, x);
}

std::vector<double> residue_limits(const SubsystemAnalysis& analysis, const GibbsMeasure& measure) {
  const std::size_t m = analysis.period;
  std::vector<double> integrals(m);
  for (std::size_t j = 0; j < m; ++j) integrals[j] = integrate(measure, analysis.h[j]);
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) out[k] += analysis.alpha[j][k] * integrals[(j + k) % m];
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kConverges: return "converges";
    case Verdict::kIndeterminate: return "indeterminate";
    case Verdict::kDoesNotConverge: return "does-not-converge";
  }
  return "unknown";
}

Verdict classify_spread(double spread) {
  if (spread <= config::kSpreadConverged) return Verdict::kConverges;
  if (spread <= config::kSpreadDiverged) return Verdict::kIndeterminate;
  return Verdict::kDoesNotConverge;
}

bool AsymptoticsReport::tail_dominated() const {
  const std::size_t half = n_max / 2;
  for (std::size_t k = 0; k < period; ++k) {
    double head = 0.0;
    double tail = 0.0;
    for (std::size_t n = k; n <= n_max; n += period)
      (n <= half ? head : tail) = std::max(n <= half ? head : tail, abs_error[n]);
    // Rounding in e^{-P_Delta} drifts linearly in n once the error hits zero.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         static_cast<double>(n_max + 8) * std::max(1.0, std::abs(predicted[k]));
    if (!(tail <= head + slack)) return false;
  }
  return true;
}

AsymptoticsReport report(const SubsystemAnalysis& analysis, const GibbsMeasure& measure,
                         std::size_t n_max, double tol) {
  const std::size_t m = analysis.period;
  if (n_max < m)
    throw InvalidArgument("n_max must be at least the period (" + std::to_string(m) + ")");
  AsymptoticsReport r;
  r.n_max = n_max;
  r.period = m;
  r.p_delta = analysis.p_delta;
  r.predicted = residue_limits(analysis, measure);
  const auto [lo, hi] = std::minmax_element(r.predicted.begin(), r.predicted.end());
  r.spread = *hi - *lo;
  r.converges_overall = r.spread <= tol;
  r.verdict = classify_spread(r.spread);

  Vector x(analysis.transfer.state_count(), 1.0);
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) scaled_step(analysis, x);
    const double scaled = integrate(measure, x);
    const double log_mu = static_cast<double>(n) * analysis.p_delta + std::log(scaled);
    r.scaled_seq.push_back(scaled);
    r.log_mu_seq.push_back(log_mu);
    r.mu_seq.push_back(n == 0 ? 1.0 : std::exp(log_mu));
    r.abs_error.push_back(std::abs(scaled - r.predicted[n % m]));
  }
  return r;
}

double theorem_gap(const SubsystemAnalysis& analysis, std::span<const double> psi, std::size_t n) {
  const std::size_t m = analysis.period;
  Vector x(psi.begin(), psi.end());
  for (std::size_t i = 0; i < n; ++i) scaled_step(analysis, x);
  const std::size_t k = n % m;
  for (std::size_t j = 0; j < m; ++j) {
    const double weight = analysis.alpha[j][k] * analysis.integrate_nu(j, psi);
    const Vector& h = analysis.h[(j + k) % m];
    for (std::size_t u = 0; u < x.size(); ++u) x[u] -= weight * h[u];
  }
  return sup_norm(x);
}

}  // namespace symdyn
