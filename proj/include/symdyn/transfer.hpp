#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "symdyn/config.hpp"
#include "symdyn/matrix.hpp"
#include "symdyn/sft.hpp"

namespace symdyn {

/// A potential depending only on the first `order` symbols of a point,
/// stored as a table over the admissible words of that length (natural-log
/// scale). Orders below 2 are not representable; a potential depending on
/// the first symbol only is stored with order 2.
class CylindricalPotential {
 public:
  /// Throws InvalidArgument when order < 2, when an admissible word has no
  /// value, when a key is not an admissible word of length `order`, or when
  /// a value is not finite.
  CylindricalPotential(SftModel model, std::size_t order, const std::map<Word, double>& values);

  static CylindricalPotential from_function(
      SftModel model, std::size_t order,
      const std::function<double(std::span<const Symbol>)>& value_of);

  const SftModel& model() const { return model_; }
  std::size_t order() const { return order_; }
  const std::vector<Word>& words() const { return words_; }
  const std::vector<double>& values() const { return values_; }

  /// Value on an admissible word of length order(); throws otherwise.
  double value(std::span<const Symbol> word) const;
  std::optional<std::size_t> index_of(std::span<const Symbol> word) const;

  /// Sum of the potential over every full window of `word`; with a word of
  /// length n + order - 1 this is the Birkhoff sum S_n.
  double window_sum(std::span<const Symbol> word) const;

  std::map<Word, double> table() const;

 private:
  SftModel model_;
  std::size_t order_;
  std::vector<Word> words_;
  std::vector<double> values_;
  std::map<Word, std::size_t, WordLess> index_;
};

/// Restriction of a potential to the sub-model on `delta` (see restrict()).
CylindricalPotential restrict_potential(const CylindricalPotential& potential,
                                        std::span<const Symbol> delta);

/// Matrix realisation of the transfer operator on functions of the first
/// order-1 symbols. States are the admissible (order-1)-words in
/// lexicographic order and
///
///   weights(u, v) = exp(potential(u + last(v)))   when v = shift(u) + s,
///
/// zero otherwise. The operator acts on a state vector psi by
/// (L psi)(v) = sum_u weights(u, v) psi(u), i.e. by the transpose.
struct TransferMatrix {
  SftModel model;
  std::size_t order = 2;
  std::vector<Word> states;
  DenseMatrix weights;

  std::optional<std::size_t> state_index(std::span<const Symbol> word) const;
  std::size_t state_count() const { return states.size(); }

  std::map<Word, std::size_t, WordLess> index;
};

TransferMatrix build_transfer(const CylindricalPotential& potential);

/// L psi for a state vector psi.
Vector apply_transfer(const TransferMatrix& transfer, std::span<const double> psi);

struct PerronData {
  double lambda = 0.0;
  Vector right;  ///< weights * right = lambda * right, sum(right) = 1
  Vector left;   ///< left * weights = lambda * left, <left, right> = 1
  std::size_t iterations = 0;
  double residual = 0.0;
  std::size_t period = 1;
};

/// Dominant eigenvalue and eigenvectors of an irreducible nonnegative
/// matrix by power iteration. For a periodic zero pattern the m-th power,
/// which is primitive on each cyclic class, is iterated on class 0 and the
/// eigenvectors are propagated to the remaining classes.
///
/// Throws PreconditionError for reducible matrices and ConvergenceError if
/// the relative residual does not fall below tol within max_iter steps.
PerronData perron(const DenseMatrix& weights, double tol = config::kPerronTol,
                  std::size_t max_iter = config::kPerronMaxIter);

inline PerronData perron(const TransferMatrix& transfer, double tol = config::kPerronTol,
                         std::size_t max_iter = config::kPerronMaxIter) {
  return perron(transfer.weights, tol, max_iter);
}

inline double pressure(const PerronData& data) { return std::log(data.lambda); }

/// Cohomologous potential with L1 = 1 and zero pressure:
/// phi'(w) = phi(w) - P + log e(w_0..w_{k-2}) - log e(w_1..w_{k-1}),
/// with e the positive eigenfunction of the transfer operator.
CylindricalPotential normalize(const CylindricalPotential& potential,
                               double tol = config::kPerronTol,
                               std::size_t max_iter = config::kPerronMaxIter);

/// True iff every column of the transfer matrix sums to 1 within tol.
bool check_normalized(const CylindricalPotential& potential,
                      double tol = config::kNormalizedTol);

/// Largest deviation of a column sum from 1.
double normalization_defect(const TransferMatrix& transfer);

/// Equilibrium state of the potential behind `transfer`, evaluated on cylinders.
class GibbsMeasure {
 public:
  GibbsMeasure(TransferMatrix transfer, PerronData perron);

  const TransferMatrix& transfer() const { return transfer_; }
  const PerronData& perron_data() const { return perron_; }
  const SftModel& model() const { return transfer_.model; }

  /// Measure of the cylinder of `word`; zero for inadmissible words and 1
  /// for the empty word.
  double measure(std::span<const Symbol> word) const;

  /// Natural log of measure(); -infinity for inadmissible words. Stays
  /// finite for long words whose measure underflows a double.
  double log_measure(std::span<const Symbol> word) const;

  /// Measures of the state cylinders, aligned with transfer().states.
  const Vector& state_measures() const { return state_measures_; }

 private:
  TransferMatrix transfer_;
  PerronData perron_;
  DenseMatrix log_weights_;
  Vector state_measures_;
};

GibbsMeasure equilibrium(TransferMatrix transfer, PerronData perron);
GibbsMeasure equilibrium(const CylindricalPotential& potential,
                         double tol = config::kPerronTol,
                         std::size_t max_iter = config::kPerronMaxIter);

/// Probability eigenmeasure of the dual operator, L* rho = e^{P} rho. Its
/// cylinders are rho[w] = (product of W along w) r_last / lambda^steps, i.e.
/// the Gibbs formula with the left vector replaced by ones. It coincides with
/// the equilibrium state exactly when the left Perron vector is constant.
GibbsMeasure conformal_measure(const CylindricalPotential& potential,
                               double tol = config::kPerronTol,
                               std::size_t max_iter = config::kPerronMaxIter);

/// Integral of a state vector against the measure.
double integrate(const GibbsMeasure& measure, std::span<const double> psi);

/// Integral of the potential itself (sum over order-words of mu[w] phi(w)).
double integrate_potential(const GibbsMeasure& measure, const CylindricalPotential& potential);

/// Measure-theoretic entropy h = P - integral of phi.
double entropy(const GibbsMeasure& measure, const CylindricalPotential& potential);

}  // namespace symdyn
