#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "symdyn/config.hpp"
#include "symdyn/subsystem.hpp"
#include "symdyn/transfer.hpp"

namespace symdyn {

/// mu(Delta_n) = integral of L_Delta^n 1, with mu(Delta_0) = 1.
double mu_delta_n(const SubsystemAnalysis& analysis, const GibbsMeasure& measure, std::size_t n);

/// Predicted limit of e^{-(k+nm) P_Delta} mu(Delta_{k+nm}) for each residue k:
/// sum_j alpha_j(k) * integral of h_{j+k}.
std::vector<double> residue_limits(const SubsystemAnalysis& analysis, const GibbsMeasure& measure);

enum class Verdict { kConverges, kIndeterminate, kDoesNotConverge };

std::string_view to_string(Verdict v);

/// Classifies a spread between residue limits with the fixed thresholds
/// config::kSpreadConverged and config::kSpreadDiverged.
Verdict classify_spread(double spread);

struct AsymptoticsReport {
  std::size_t n_max = 0;
  std::size_t period = 1;
  double p_delta = 0.0;
  std::vector<double> mu_seq;      ///< mu(Delta_n), n = 0..n_max (may underflow to 0)
  std::vector<double> log_mu_seq;  ///< log mu(Delta_n)
  std::vector<double> scaled_seq;  ///< e^{-n P_Delta} mu(Delta_n)
  std::vector<double> predicted;   ///< residue limits, k = 0..m-1
  std::vector<double> abs_error;   ///< |scaled(n) - predicted(n mod m)|
  double spread = 0.0;
  bool converges_overall = false;
  Verdict verdict = Verdict::kConverges;

  std::size_t residue(std::size_t n) const { return n % period; }
  /// For every residue class, errors in the second half of the run never exceed
  /// the largest error in the first half (up to rounding).
  bool tail_dominated() const;
};

/// Throws InvalidArgument when n_max < period.
AsymptoticsReport report(const SubsystemAnalysis& analysis, const GibbsMeasure& measure,
                         std::size_t n_max, double tol = config::kSpreadConverged);

/// sup over states of
///   | e^{-n P_Delta} L_Delta^n psi - sum_j alpha_j(n mod m) h_{j+n} int_{Omega_j} psi dnu_j |.
double theorem_gap(const SubsystemAnalysis& analysis, std::span<const double> psi, std::size_t n);

}  // namespace symdyn
