#include "symdyn/subsystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "symdyn/errors.hpp"

namespace symdyn {

namespace {

bool contains(const std::vector<Symbol>& sorted, Symbol s) {
  return std::binary_search(sorted.begin(), sorted.end(), s);
}

struct Classes {
  std::size_t period = 1;
  std::vector<std::vector<Symbol>> members;
  std::vector<int> class_of;
};

// Cyclic classes of A_Delta expressed in full-alphabet symbols.
Classes delta_classes(const SftModel& model, const std::vector<Symbol>& delta) {
  const SftModel sub = restrict(model, delta);
  if (!graph::strongly_connected(sub.adjacency()))
    throw PreconditionError(
        "A_Delta is reducible; only irreducible subsystems are supported");
  const CyclicDecomposition cyc = period(sub);
  Classes out;
  out.period = cyc.period;
  out.members.assign(cyc.period, {});
  out.class_of.assign(model.size(), -1);
  for (std::size_t i = 0; i < delta.size(); ++i) {
    out.members[cyc.class_of[i]].push_back(delta[i]);
    out.class_of[delta[i]] = static_cast<int>(cyc.class_of[i]);
  }
  return out;
}

std::vector<Symbol> checked_delta(const SftModel& model, std::span<const Symbol> delta) {
  std::vector<Symbol> subset = normalize_subset(model, delta);
  if (subset.empty()) throw PreconditionError("Delta must be non-empty");
  if (subset.size() == model.size())
    throw PreconditionError("Delta must be a proper subset of the alphabet (Delta != V)");
  return subset;
}

// Iterates x <- step * x from `seed` until the sup-norm change is at most
// tol * sup|x|. Returns the fixed point and the number of applications.
std::pair<Vector, std::size_t> iterate_to_fixed_point(const DenseMatrix& step, const Vector& seed,
                                                      double tol, std::size_t max_steps) {
  Vector x = step.apply(seed);
  for (std::size_t n = 2; n <= max_steps; ++n) {
    Vector y = step.apply(x);
    const double change = sup_distance(x, y);
    x = std::move(y);
    if (change <= tol * sup_norm(x)) return {std::move(x), n};
  }
  throw ConvergenceError("eigenfunction iteration did not converge within " +
                         std::to_string(max_steps) + " steps");
}

DenseMatrix scaled_power(const DenseMatrix& action, std::size_t m, double log_scale) {
  DenseMatrix step = action.power(m);
  const double factor = std::exp(-log_scale);
  for (std::size_t i = 0; i < step.rows(); ++i)
    for (std::size_t j = 0; j < step.cols(); ++j) step(i, j) *= factor;
  return step;
}

// First `length` base symbols of the expansion of a block-model state.
Word base_prefix(const BlockModel& blocks, std::span<const Symbol> block_word, std::size_t length) {
  Word expanded = blocks.expand(block_word);
  expanded.resize(length);
  return expanded;
}

}  // namespace

RestrictedTransfer restrict_transfer(const TransferMatrix& transfer,
                                     std::span<const Symbol> delta) {
  const std::vector<Symbol> subset = normalize_subset(transfer.model, delta);
  const std::size_t n = transfer.state_count();
  RestrictedTransfer out;
  out.mask.resize(n);
  out.action = DenseMatrix(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    out.mask[u] = contains(subset, transfer.states[u].front());
    if (!out.mask[u]) continue;
    for (std::size_t v = 0; v < n; ++v) out.action(v, u) = transfer.weights(u, v);
  }
  return out;
}

ZSupport z_support(const SftModel& model, std::span<const Symbol> delta) {
  const std::vector<Symbol> subset = checked_delta(model, delta);
  const Classes cls = delta_classes(model, subset);
  const std::size_t m = cls.period;
  ZSupport z;
  z.per_class.assign(m, std::vector<bool>(model.size(), false));
  z.all.assign(model.size(), false);
  for (std::size_t j = 0; j < m; ++j) {
    for (Symbol b : cls.members[(j + m - 1) % m])
      for (Symbol x : model.successors(b)) z.per_class[j][x] = true;
    for (Symbol x = 0; x < model.size(); ++x)
      if (z.per_class[j][x]) z.all[x] = true;
  }
  return z;
}

std::vector<bool> state_mask(const TransferMatrix& transfer, const std::vector<bool>& symbol_mask) {
  std::vector<bool> out(transfer.state_count());
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = symbol_mask.at(transfer.states[u].front());
  return out;
}

CylindricalPotential block_potential(const CylindricalPotential& potential,
                                     const BlockModel& blocks) {
  const std::size_t k = potential.order();
  const std::size_t m = blocks.block_length;
  // Enough blocks to cover the m windows of length k starting in block 0.
  const std::size_t order = std::max<std::size_t>(2, (m + k - 1 + m - 1) / m);
  return CylindricalPotential::from_function(
      blocks.blocks, order, [&](std::span<const Symbol> block_word) {
        const Word x = blocks.expand(block_word);
        const std::span<const Symbol> view(x);
        double total = 0.0;
        for (std::size_t t = 0; t < m; ++t) total += potential.value(view.subspan(t, k));
        return total;
      });
}

std::vector<Symbol> block_class_members(const BlockModel& blocks, const std::vector<int>& class_of,
                                        std::size_t period, std::size_t j) {
  std::vector<Symbol> out;
  for (Symbol b = 0; b < blocks.block_symbols.size(); ++b) {
    const Word& w = blocks.block_symbols[b];
    bool member = true;
    for (std::size_t s = 0; s < w.size() && member; ++s)
      member = class_of[w[s]] == static_cast<int>((j + s) % period);
    if (member) out.push_back(b);
  }
  return out;
}

double SubsystemAnalysis::integrate_nu(std::size_t j, std::span<const double> psi) const {
  return dot(nu.at(j).base_marginal, psi);
}

SubsystemAnalysis analyze(const CylindricalPotential& potential, std::span<const Symbol> delta_in,
                          double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const SftModel& model = potential.model();
  std::vector<Symbol> delta = checked_delta(model, delta_in);

  TransferMatrix transfer = build_transfer(potential);
  const double defect = normalization_defect(transfer);
  if (defect > config::kNormalizedTol)
    throw PreconditionError("potential is not normalized (max |L1 - 1| = " +
                            std::to_string(defect) + ")");

  Classes cls = delta_classes(model, delta);
  const std::size_t m = cls.period;
  const std::size_t k = potential.order();
  const std::size_t n = transfer.state_count();

  // Weights among states lying entirely inside Delta.
  std::vector<std::size_t> inside;
  for (std::size_t u = 0; u < n; ++u) {
    const Word& st = transfer.states[u];
    if (std::all_of(st.begin(), st.end(), [&](Symbol s) { return contains(delta, s); }))
      inside.push_back(u);
  }
  DenseMatrix delta_weights(inside.size(), inside.size());
  for (std::size_t a = 0; a < inside.size(); ++a)
    for (std::size_t b = 0; b < inside.size(); ++b)
      delta_weights(a, b) = transfer.weights(inside[a], inside[b]);
  PerronData delta_perron = perron(delta_weights);
  const double p_delta = pressure(delta_perron);

  RestrictedTransfer restricted = restrict_transfer(transfer, delta);

  // h_j = lim e^{-n m P_Delta} L_Delta^{n m} 1_{x_0 in Delta_j}
  const DenseMatrix step =
      scaled_power(restricted.action, m, static_cast<double>(m) * p_delta);
  std::vector<Vector> h(m);
  std::vector<std::size_t> h_steps(m);
  Vector h_delta(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    Vector seed(n, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      if (cls.class_of[transfer.states[u].front()] == static_cast<int>(j)) seed[u] = 1.0;
    auto [fixed, steps] =
        iterate_to_fixed_point(step, seed, tol, config::kEigenfunctionMaxSteps);
    h[j] = std::move(fixed);
    h_steps[j] = steps;
    for (std::size_t u = 0; u < n; ++u) h_delta[u] += h[j][u];
  }

  // nu_j on the block components, with marginals on base states.
  BlockModel blocks = block_recode(model, m);
  CylindricalPotential bpot = block_potential(potential, blocks);
  const std::size_t marginal_blocks = (k - 1 + m - 1) / m;
  std::vector<BlockComponent> nu;
  nu.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Symbol> members = block_class_members(blocks, cls.class_of, m, j);
    CylindricalPotential sub_pot = restrict_potential(bpot, members);
    GibbsMeasure g = conformal_measure(sub_pot);
    Vector marginal(n, 0.0);
    for (const Word& sub_word : admissible_words(sub_pot.model(), marginal_blocks)) {
      Word block_word;
      for (Symbol s : sub_word) block_word.push_back(members[s]);
      const Word prefix = base_prefix(blocks, block_word, k - 1);
      const auto idx = transfer.state_index(prefix);
      if (idx) marginal[*idx] += g.measure(sub_word);
    }
    nu.push_back(BlockComponent{std::move(members), std::move(g), std::move(marginal)});
  }

  // d_j = integral of L_Delta 1 against nu_{j+1}.
  const Vector l_one = restricted.apply(Vector(n, 1.0));
  std::vector<double> d(m);
  for (std::size_t j = 0; j < m; ++j) d[j] = dot(nu[(j + 1) % m].base_marginal, l_one);

  std::vector<std::vector<double>> alpha(m, std::vector<double>(m, 1.0));
  for (std::size_t j = 0; j < m; ++j) {
    double log_product = 0.0;
    for (std::size_t kk = 1; kk < m; ++kk) {
      log_product += std::log(d[(j + kk - 1) % m]);
      alpha[j][kk] = std::exp(log_product - static_cast<double>(kk) * p_delta);
    }
  }

  ZSupport z = z_support(model, delta);
  std::vector<std::vector<bool>> z_state_masks;
  for (const auto& mask : z.per_class) z_state_masks.push_back(state_mask(transfer, mask));
  std::vector<bool> z_state_union = state_mask(transfer, z.all);

  return SubsystemAnalysis{
      .delta = std::move(delta),
      .period = m,
      .classes = std::move(cls.members),
      .class_of = std::move(cls.class_of),
      .transfer = std::move(transfer),
      .restricted = std::move(restricted),
      .delta_perron = std::move(delta_perron),
      .p_delta = p_delta,
      .h = std::move(h),
      .h_delta = std::move(h_delta),
      .h_steps = std::move(h_steps),
      .blocks = std::move(blocks),
      .block_potential = std::move(bpot),
      .nu = std::move(nu),
      .d = std::move(d),
      .alpha = std::move(alpha),
      .z = std::move(z),
      .z_state_masks = std::move(z_state_masks),
      .z_state_union = std::move(z_state_union),
  };
}

double py_measure(const SubsystemAnalysis& analysis, const GibbsMeasure& measure,
                  std::span<const Symbol> word) {
  const TransferMatrix& t = analysis.transfer;
  const std::size_t s = t.order - 1;
  if (word.empty()) return integrate(measure, analysis.h_delta);
  if (!t.model.admissible(word)) return 0.0;
  if (word.size() >= s) {
    const std::size_t u = *t.state_index(word.first(s));
    return analysis.h_delta[u] * measure.measure(word);
  }
  double total = 0.0;
  for (std::size_t u = 0; u < t.state_count(); ++u)
    if (std::equal(word.begin(), word.end(), t.states[u].begin()))
      total += analysis.h_delta[u] * measure.state_measures()[u];
  return total;
}

double BlockEquivalenceReport::worst() const {
  double w = std::max(product_residual, h_delta_residual);
  for (double v : h_deviation) w = std::max(w, v);
  for (double v : w_deviation) w = std::max(w, v);
  for (double v : eigen_residual) w = std::max(w, v);
  return w;
}

BlockEquivalenceReport verify_block_equivalence(const SubsystemAnalysis& analysis, double tol) {
  const std::size_t m = analysis.period;
  const std::size_t base_len = analysis.transfer.order - 1;
  const BlockModel& blocks = analysis.blocks;
  const TransferMatrix block_transfer = build_transfer(analysis.block_potential);
  const std::size_t nb = block_transfer.state_count();
  const double log_scale = static_cast<double>(m) * analysis.p_delta;

  BlockEquivalenceReport report;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& members = analysis.nu[j].block_symbols;
    RestrictedTransfer restricted = restrict_transfer(block_transfer, members);
    const DenseMatrix step = scaled_power(restricted.action, 1, log_scale);
    Vector block_h;
    try {
      block_h = iterate_to_fixed_point(step, Vector(nb, 1.0), tol,
                                       config::kEigenfunctionMaxSteps)
                    .first;
    } catch (const ConvergenceError&) {
      report.h_deviation.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double dev = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const Word prefix = base_prefix(blocks, block_transfer.states[b], base_len);
      const std::size_t u = *analysis.transfer.state_index(prefix);
      dev = std::max(dev, std::abs(block_h[b] - analysis.h[j][u]));
    }
    report.h_deviation.push_back(dev);

    // w_j is the left Perron vector of the block component (the eigenfunction
    // of its transfer operator), scaled so that its nu_j integral is 1.
    const TransferMatrix& sub = analysis.nu[j].measure.transfer();
    const PerronData pd = perron(sub);
    const double scale = std::accumulate(pd.right.begin(), pd.right.end(), 0.0) /
                         dot(pd.left, pd.right);
    double wdev = 0.0;
    for (std::size_t b = 0; b < sub.state_count(); ++b) {
      Word block_word;
      for (Symbol s : sub.states[b]) block_word.push_back(members[s]);
      const Word prefix = base_prefix(blocks, block_word, base_len);
      const std::size_t u = *analysis.transfer.state_index(prefix);
      wdev = std::max(wdev, std::abs(pd.left[b] * scale - analysis.h[j][u]));
    }
    report.w_deviation.push_back(wdev);
  }

  double log_product = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const Vector lh = analysis.restricted.apply(analysis.h[j]);
    const Vector& next = analysis.h[(j + 1) % m];
    double res = 0.0;
    for (std::size_t u = 0; u < lh.size(); ++u)
      res = std::max(res, std::abs(lh[u] - analysis.d[j] * next[u]));
    report.eigen_residual.push_back(res);
    log_product += std::log(analysis.d[j]);
  }
  report.product_residual = std::abs(std::exp(log_product - log_scale) - 1.0);

  Vector x = analysis.h_delta;
  for (std::size_t s = 0; s < m; ++s) x = analysis.restricted.apply(x);
  const double factor = std::exp(log_scale);
  double res = 0.0;
  for (std::size_t u = 0; u < x.size(); ++u)
    res = std::max(res, std::abs(x[u] - factor * analysis.h_delta[u]));
  report.h_delta_residual = res / (factor * sup_norm(analysis.h_delta));
  return report;
}

}  // namespace symdyn
