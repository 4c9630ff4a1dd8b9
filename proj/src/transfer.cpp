#include "symdyn/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "symdyn/errors.hpp"

namespace symdyn {

CylindricalPotential::CylindricalPotential(SftModel model, std::size_t order,
                                           const std::map<Word, double>& values)
    : model_(std::move(model)), order_(order) {
  if (order_ < 2) throw InvalidArgument("potential order must be at least 2");
  words_ = admissible_words(model_, order_);
  values_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const auto it = values.find(words_[i]);
    if (it == values.end())
      throw InvalidArgument("potential has no value for admissible word " +
                            model_.format_word(words_[i]));
    if (!std::isfinite(it->second))
      throw InvalidArgument("potential value for " + model_.format_word(words_[i]) +
                            " is not finite");
    values_.push_back(it->second);
    index_.emplace(words_[i], i);
  }
  if (values.size() != words_.size()) {
    for (const auto& [word, value] : values)
      if (!index_.contains(word))
        throw InvalidArgument("potential entry " + model_.format_word(word) +
                              " is not an admissible word of length " + std::to_string(order_));
  }
}

CylindricalPotential CylindricalPotential::from_function(
    SftModel model, std::size_t order,
    const std::function<double(std::span<const Symbol>)>& value_of) {
  std::map<Word, double> table;
  for (Word& w : admissible_words(model, order)) {
    const double v = value_of(w);
    table.emplace(std::move(w), v);
  }
  return CylindricalPotential(std::move(model), order, table);
}

std::optional<std::size_t> CylindricalPotential::index_of(std::span<const Symbol> word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double CylindricalPotential::value(std::span<const Symbol> word) const {
  const auto idx = index_of(word);
  if (!idx) throw InvalidArgument("word is not an admissible word of the potential's order");
  return values_[*idx];
}

double CylindricalPotential::window_sum(std::span<const Symbol> word) const {
  double total = 0.0;
  for (std::size_t t = 0; t + order_ <= word.size(); ++t) total += value(word.subspan(t, order_));
  return total;
}

std::map<Word, double> CylindricalPotential::table() const {
  std::map<Word, double> out;
  for (std::size_t i = 0; i < words_.size(); ++i) out.emplace(words_[i], values_[i]);
  return out;
}

CylindricalPotential restrict_potential(const CylindricalPotential& potential,
                                        std::span<const Symbol> delta) {
  const std::vector<Symbol> subset = normalize_subset(potential.model(), delta);
  SftModel sub = restrict(potential.model(), subset);
  return CylindricalPotential::from_function(
      std::move(sub), potential.order(), [&](std::span<const Symbol> w) {
        Word original;
        original.reserve(w.size());
        for (Symbol s : w) original.push_back(subset[s]);
        return potential.value(original);
      });
}

std::optional<std::size_t> TransferMatrix::state_index(std::span<const Symbol> word) const {
  const auto it = index.find(word);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

TransferMatrix build_transfer(const CylindricalPotential& potential) {
  TransferMatrix t{.model = potential.model(), .order = potential.order(), .states = {}, .weights = {}, .index = {}};
  t.states = admissible_words(t.model, t.order - 1);
  for (std::size_t i = 0; i < t.states.size(); ++i) t.index.emplace(t.states[i], i);
  t.weights = DenseMatrix(t.states.size(), t.states.size());
  for (std::size_t w = 0; w < potential.words().size(); ++w) {
    const Word& word = potential.words()[w];
    const std::span<const Symbol> view(word);
    const std::size_t u = *t.state_index(view.first(t.order - 1));
    const std::size_t v = *t.state_index(view.last(t.order - 1));
    t.weights(u, v) = std::exp(potential.values()[w]);
  }
  return t;
}

Vector apply_transfer(const TransferMatrix& transfer, std::span<const double> psi) {
  return transfer.weights.apply_transpose(psi);
}

namespace {

struct PowerResult {
  double rho = 0.0;
  Vector vector;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Solves (b - sigma I) x = rhs by Gaussian elimination with partial
// pivoting. A vanishing pivot is replaced by a tiny one, as usual for
// inverse iteration.
Vector solve_shifted(const DenseMatrix& b, double sigma, Vector rhs) {
  const std::size_t n = b.rows();
  DenseMatrix a = b;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) -= sigma;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  }
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
      std::swap(rhs[c], rhs[piv]);
    }
    if (std::abs(a(c, c)) < tiny) a(c, c) = tiny;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      rhs[r] -= f * rhs[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double acc = rhs[c];
    for (std::size_t j = c + 1; j < n; ++j) acc -= a(c, j) * rhs[j];
    rhs[c] = acc / a(c, c);
  }
  return rhs;
}

// Two steps of inverse iteration at the converged eigenvalue estimate take
// the eigenvector from ~tol / gap accuracy down to rounding level.
Vector polish(const DenseMatrix& b, double rho, Vector x) {
  Vector best = x;
  for (int step = 0; step < 2; ++step) {
    Vector y = solve_shifted(b, rho, x);
    const double total = std::accumulate(y.begin(), y.end(), 0.0);
    if (!std::isfinite(total) || total == 0.0) return best;
    for (double& v : y) v /= total;
    if (*std::min_element(y.begin(), y.end()) < 0.0) return best;
    const double s = sup_norm(y);
    for (double& v : y) v /= s;
    x = y;
    best = std::move(y);
  }
  return best;
}

// Power iteration for a primitive nonnegative matrix, sup-norm scaled.
PowerResult power_iterate(const DenseMatrix& b, double tol, std::size_t max_iter) {
  const std::size_t n = b.rows();
  Vector x(n, 1.0);
  PowerResult out;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Vector y = b.apply(x);
    const double sx = std::accumulate(x.begin(), x.end(), 0.0);
    const double sy = std::accumulate(y.begin(), y.end(), 0.0);
    const double rho = sy / sx;
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw ConvergenceError("power iteration produced a non-positive eigenvalue estimate");
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(y[i] - rho * x[i]));
    res /= rho * sup_norm(x);
    const double scale = sup_norm(y);
    for (double& v : y) v /= scale;
    x = std::move(y);
    if (res <= tol) {
      out.rho = rho;
      out.vector = polish(b, rho, std::move(x));
      out.iterations = it;
      out.residual = res;
      return out;
    }
  }
  throw ConvergenceError("power iteration did not converge within " + std::to_string(max_iter) +
                         " iterations");
}

double eigen_residual(const DenseMatrix& w, const Vector& right, const Vector& left,
                      double lambda) {
  const Vector wr = w.apply(right);
  const Vector lw = w.apply_transpose(left);
  double rr = 0.0, rl = 0.0;
  for (std::size_t i = 0; i < right.size(); ++i) {
    rr = std::max(rr, std::abs(wr[i] - lambda * right[i]));
    rl = std::max(rl, std::abs(lw[i] - lambda * left[i]));
  }
  return std::max(rr / (lambda * sup_norm(right)), rl / (lambda * sup_norm(left)));
}

}  // namespace

PerronData perron(const DenseMatrix& weights, double tol, std::size_t max_iter) {
  const std::size_t n = weights.rows();
  if (n == 0 || weights.cols() != n) throw InvalidArgument("Perron solve needs a square matrix");
  graph::Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (weights(i, j) < 0.0) throw InvalidArgument("Perron solve needs a nonnegative matrix");
      if (weights(i, j) > 0.0) adj[i].push_back(j);
    }
  if (!graph::strongly_connected(adj)) throw PreconditionError("matrix is reducible");
  const CyclicDecomposition cyc = graph::cyclic_decomposition(adj);
  const std::size_t m = cyc.period;
  const auto& base = cyc.classes[0];

  const DenseMatrix wm = weights.power(m);
  DenseMatrix block(base.size(), base.size());
  for (std::size_t a = 0; a < base.size(); ++a)
    for (std::size_t b = 0; b < base.size(); ++b) block(a, b) = wm(base[a], base[b]);

  const PowerResult rightPart = power_iterate(block, tol, max_iter);
  const PowerResult leftPart = power_iterate(block.transpose(), tol, max_iter);

  PerronData out;
  out.period = m;
  const double rho = dot(leftPart.vector, block.apply(rightPart.vector)) /
                     dot(leftPart.vector, rightPart.vector);
  out.lambda = m == 1 ? rho : std::pow(rho, 1.0 / static_cast<double>(m));
  out.iterations = std::max(rightPart.iterations, leftPart.iterations);

  out.right.assign(n, 0.0);
  out.left.assign(n, 0.0);
  for (std::size_t a = 0; a < base.size(); ++a) {
    out.right[base[a]] = rightPart.vector[a];
    out.left[base[a]] = leftPart.vector[a];
  }
  // Edges advance the class by one, so W r on class s only reads class s+1
  // and l W on class s only reads class s-1.
  for (std::size_t s = m - 1; s >= 1; --s) {
    const Vector wr = weights.apply(out.right);
    for (std::size_t u : cyc.classes[s]) out.right[u] = wr[u] / out.lambda;
  }
  for (std::size_t s = 1; s < m; ++s) {
    const Vector lw = weights.apply_transpose(out.left);
    for (std::size_t v : cyc.classes[s]) out.left[v] = lw[v] / out.lambda;
  }

  const double total = std::accumulate(out.right.begin(), out.right.end(), 0.0);
  for (double& v : out.right) v /= total;
  const double pairing = dot(out.left, out.right);
  for (double& v : out.left) v /= pairing;

  out.residual = eigen_residual(weights, out.right, out.left, out.lambda);
  return out;
}

CylindricalPotential normalize(const CylindricalPotential& potential, double tol,
                               std::size_t max_iter) {
  const ValidationReport report = validate(potential.model());
  if (!report.irreducible || !report.aperiodic)
    throw PreconditionError("normalization needs an irreducible aperiodic model");
  const TransferMatrix t = build_transfer(potential);
  const PerronData pd = perron(t, tol, max_iter);
  const double p = pressure(pd);
  const std::size_t k = potential.order();
  std::map<Word, double> table;
  for (std::size_t i = 0; i < potential.words().size(); ++i) {
    const Word& w = potential.words()[i];
    const std::span<const Symbol> view(w);
    const std::size_t u = *t.state_index(view.first(k - 1));
    const std::size_t v = *t.state_index(view.last(k - 1));
    table.emplace(w, potential.values()[i] - p + std::log(pd.left[u]) - std::log(pd.left[v]));
  }
  return CylindricalPotential(potential.model(), k, table);
}

double normalization_defect(const TransferMatrix& transfer) {
  const Vector ones(transfer.state_count(), 1.0);
  const Vector sums = apply_transfer(transfer, ones);
  double defect = 0.0;
  for (double s : sums) defect = std::max(defect, std::abs(s - 1.0));
  return defect;
}

bool check_normalized(const CylindricalPotential& potential, double tol) {
  return normalization_defect(build_transfer(potential)) <= tol;
}

GibbsMeasure::GibbsMeasure(TransferMatrix transfer, PerronData perron)
    : transfer_(std::move(transfer)), perron_(std::move(perron)) {
  const std::size_t n = transfer_.state_count();
  if (perron_.right.size() != n || perron_.left.size() != n)
    throw InvalidArgument("Perron data does not match the transfer matrix");
  log_weights_ = DenseMatrix(n, n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (transfer_.weights(i, j) > 0.0) log_weights_(i, j) = std::log(transfer_.weights(i, j));
  const double pairing = dot(perron_.left, perron_.right);
  state_measures_.resize(n);
  for (std::size_t u = 0; u < n; ++u)
    state_measures_[u] = perron_.left[u] * perron_.right[u] / pairing;
}

double GibbsMeasure::log_measure(std::span<const Symbol> word) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const std::size_t s = transfer_.order - 1;
  if (word.empty()) return 0.0;
  if (!transfer_.model.admissible(word)) return kNegInf;
  if (word.size() < s) {
    double total = 0.0;
    for (std::size_t u = 0; u < transfer_.state_count(); ++u) {
      const Word& state = transfer_.states[u];
      if (std::equal(word.begin(), word.end(), state.begin())) total += state_measures_[u];
    }
    return total > 0.0 ? std::log(total) : kNegInf;
  }
  std::size_t prev = *transfer_.state_index(word.first(s));
  double acc = std::log(perron_.left[prev]);
  const double log_lambda = std::log(perron_.lambda);
  for (std::size_t t = 1; t + s <= word.size(); ++t) {
    const std::size_t next = *transfer_.state_index(word.subspan(t, s));
    acc += log_weights_(prev, next) - log_lambda;
    prev = next;
  }
  acc += std::log(perron_.right[prev]) - std::log(dot(perron_.left, perron_.right));
  return acc;
}

double GibbsMeasure::measure(std::span<const Symbol> word) const {
  return std::exp(log_measure(word));
}

GibbsMeasure equilibrium(TransferMatrix transfer, PerronData perron) {
  return GibbsMeasure(std::move(transfer), std::move(perron));
}

GibbsMeasure equilibrium(const CylindricalPotential& potential, double tol, std::size_t max_iter) {
  TransferMatrix t = build_transfer(potential);
  PerronData pd = perron(t, tol, max_iter);
  return GibbsMeasure(std::move(t), std::move(pd));
}

GibbsMeasure conformal_measure(const CylindricalPotential& potential, double tol,
                               std::size_t max_iter) {
  TransferMatrix t = build_transfer(potential);
  PerronData pd = perron(t, tol, max_iter);
  pd.left.assign(pd.left.size(), 1.0);
  return GibbsMeasure(std::move(t), std::move(pd));
}

double integrate(const GibbsMeasure& measure, std::span<const double> psi) {
  return dot(measure.state_measures(), psi);
}

double integrate_potential(const GibbsMeasure& measure, const CylindricalPotential& potential) {
  double total = 0.0;
  for (std::size_t i = 0; i < potential.words().size(); ++i)
    total += measure.measure(potential.words()[i]) * potential.values()[i];
  return total;
}

double entropy(const GibbsMeasure& measure, const CylindricalPotential& potential) {
  return pressure(measure.perron_data()) - integrate_potential(measure, potential);
}

}  // namespace symdyn
