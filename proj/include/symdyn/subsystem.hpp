#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "symdyn/config.hpp"
#include "symdyn/sft.hpp"
#include "symdyn/transfer.hpp"

namespace symdyn {

/// Restricted transfer operator L_Delta psi = L(psi * 1_{x_0 in Delta}) on
/// state vectors. `mask[u]` is true when the first symbol of state u is in
/// Delta; `action(v, u) = weights(u, v) * mask[u]`, so L_Delta psi = action * psi.
struct RestrictedTransfer {
  std::vector<bool> mask;
  DenseMatrix action;

  Vector apply(std::span<const double> psi) const { return action.apply(psi); }
};

RestrictedTransfer restrict_transfer(const TransferMatrix& transfer,
                                     std::span<const Symbol> delta);

/// Supports Z_{Delta_j}: cylinders C[x_0] whose first symbol has a
/// predecessor in class j-1 (mod m). Masks are over the symbols of the
/// full alphabet.
struct ZSupport {
  std::vector<std::vector<bool>> per_class;
  std::vector<bool> all;
};

ZSupport z_support(const SftModel& model, std::span<const Symbol> delta);

/// Lift a symbol mask to the states of a transfer matrix (by first symbol).
std::vector<bool> state_mask(const TransferMatrix& transfer, const std::vector<bool>& symbol_mask);

/// The measure nu_j on the aperiodic block component Delta^(m)_j, together
/// with its marginal on the base states. nu_j is the probability eigenmeasure
/// of the dual of L_{Delta^(m)_j}: it is the measure for which
/// e^{-n m P_Delta} L^n psi -> h_j * integral(psi d nu_j) holds.
struct BlockComponent {
  std::vector<Symbol> block_symbols;  ///< members of Delta^(m)_j in the block alphabet
  GibbsMeasure measure;               ///< conformal, on restrict(block model, block_symbols)
  Vector base_marginal;               ///< nu_j of each base state cylinder
};

struct SubsystemAnalysis {
  std::vector<Symbol> delta;
  std::size_t period = 1;
  /// Cyclic classes of A_Delta in full-alphabet symbols; class 0 holds the
  /// lowest-index member of Delta.
  std::vector<std::vector<Symbol>> classes;
  /// Class of every symbol of the full alphabet, -1 outside Delta.
  std::vector<int> class_of;

  TransferMatrix transfer;
  RestrictedTransfer restricted;
  PerronData delta_perron;  ///< of the weights restricted to states inside Delta
  double p_delta = 0.0;

  std::vector<Vector> h;
  Vector h_delta;
  std::vector<std::size_t> h_steps;

  BlockModel blocks;
  CylindricalPotential block_potential;  ///< S_m(phi) on the block model
  std::vector<BlockComponent> nu;

  std::vector<double> d;
  /// alpha[j][k] for j, k in 0..m-1.
  std::vector<std::vector<double>> alpha;

  ZSupport z;
  std::vector<std::vector<bool>> z_state_masks;
  std::vector<bool> z_state_union;

  /// Integral of a state vector against nu_j over Omega_j.
  double integrate_nu(std::size_t j, std::span<const double> psi) const;
};

/// Full analysis of the Delta-subsystem for a normalized potential.
///
/// Throws PreconditionError when the potential is not normalized (within
/// config::kNormalizedTol), when Delta is empty or the whole alphabet, or
/// when A_Delta is reducible; ConvergenceError when an iteration stalls.
SubsystemAnalysis analyze(const CylindricalPotential& potential, std::span<const Symbol> delta,
                          double tol = config::kEigenfunctionTol);

/// Block recoding of the potential: value on a block word of length
/// `order` equals the Birkhoff sum S_m(phi) of its base expansion.
CylindricalPotential block_potential(const CylindricalPotential& potential,
                                     const BlockModel& blocks);

/// Block symbols whose base word runs through classes j, j+1, ... of `class_of`.
std::vector<Symbol> block_class_members(const BlockModel& blocks, const std::vector<int>& class_of,
                                        std::size_t period, std::size_t j);

/// Pianigiani-Yorke measure of the cylinder of `word`: integral of h_Delta
/// over C[word]. The empty word gives the total mass.
double py_measure(const SubsystemAnalysis& analysis, const GibbsMeasure& measure,
                  std::span<const Symbol> word);

struct BlockEquivalenceReport {
  /// sup |h_j(block route) - h_j(direct)| per class.
  std::vector<double> h_deviation;
  /// sup |w_j - h_j| on states of Omega_j, with w_j the eigenfunction of
  /// the block component's own transfer matrix.
  std::vector<double> w_deviation;
  /// sup |L_Delta h_j - d_j h_{j+1}| per class.
  std::vector<double> eigen_residual;
  /// |prod d_j - exp(m P_Delta)| / exp(m P_Delta).
  double product_residual = 0.0;
  /// sup |L_Delta^m h_Delta - exp(m P_Delta) h_Delta|, relative to sup h_Delta.
  double h_delta_residual = 0.0;

  double worst() const;
};

/// Recomputes every h_j from the block-recoded operator L_{Delta^(m)_j}
/// (seeded with 1), maps it back to base states and compares.
BlockEquivalenceReport verify_block_equivalence(const SubsystemAnalysis& analysis,
                                                double tol = config::kEigenfunctionTol);

}  // namespace symdyn
