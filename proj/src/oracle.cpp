#include "symdyn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symdyn/config.hpp"
#include "symdyn/errors.hpp"

namespace symdyn::oracle {

namespace {

// Visits every admissible word of the given length over `alphabet`.
template <typename Visit>
void for_each_word(const SftModel& model, const std::vector<Symbol>& alphabet, std::size_t length,
                   Visit&& visit) {
  // Count the admissible words first (paths in the alphabet subgraph) so the
  // budget reflects the actual work rather than |alphabet|^length.
  std::vector<double> ends(model.size(), 0.0);
  for (Symbol s : alphabet) ends[s] = 1.0;
  for (std::size_t step = 1; step < length; ++step) {
    std::vector<double> next(model.size(), 0.0);
    for (Symbol a : alphabet)
      for (Symbol b : alphabet)
        if (model.allowed(a, b)) next[b] += ends[a];
    ends = std::move(next);
  }
  double count = 0.0;
  for (Symbol s : alphabet) count += ends[s];
  if (length > 0 && count > config::kEnumerationBudget)
    throw InvalidArgument("enumeration of " + std::to_string(static_cast<long long>(count)) +
                          " words of length " + std::to_string(length) + " exceeds the budget");
  Word word;
  word.reserve(length);
  auto extend = [&](auto&& self) -> void {
    if (word.size() == length) {
      visit(std::span<const Symbol>(word));
      return;
    }
    for (Symbol s : alphabet) {
      if (!word.empty() && !model.allowed(word.back(), s)) continue;
      word.push_back(s);
      self(self);
      word.pop_back();
    }
  };
  extend(extend);
}

std::vector<Symbol> whole_alphabet(const SftModel& model) {
  std::vector<Symbol> all(model.size());
  for (Symbol s = 0; s < model.size(); ++s) all[s] = s;
  return all;
}

}  // namespace

double brute_mu_delta_n(const SftModel& model, const GibbsMeasure& measure,
                        std::span<const Symbol> delta, std::size_t n) {
  if (n == 0) return 1.0;
  const std::vector<Symbol> alphabet = normalize_subset(model, delta);
  double total = 0.0;
  for_each_word(model, alphabet, n,
                [&](std::span<const Symbol> w) { total += measure.measure(w); });
  return total;
}

double brute_apply(const CylindricalPotential& potential, const PointFunction& psi,
                   std::span<const Symbol> x_word) {
  const std::size_t k = potential.order();
  if (x_word.size() < k - 1)
    throw InvalidArgument("point prefix shorter than the potential's order - 1");
  const SftModel& model = potential.model();
  double total = 0.0;
  for (Symbol i : model.predecessors(x_word.front())) {
    Word y{i};
    y.insert(y.end(), x_word.begin(), x_word.end());
    const std::span<const Symbol> view(y);
    total += std::exp(potential.value(view.first(k))) * psi(view);
  }
  return total;
}

double finite_pressure_estimate(const CylindricalPotential& potential,
                                std::optional<std::vector<Symbol>> delta, std::size_t n) {
  if (n == 0) throw InvalidArgument("pressure estimate needs n >= 1");
  const SftModel& model = potential.model();
  const std::vector<Symbol> alphabet =
      delta ? normalize_subset(model, *delta) : whole_alphabet(model);
  const std::size_t k = potential.order();
  double z0 = 0.0;
  for_each_word(model, alphabet, k - 1, [&](std::span<const Symbol>) { z0 += 1.0; });
  double zn = 0.0;
  for_each_word(model, alphabet, n + k - 1,
                [&](std::span<const Symbol> w) { zn += std::exp(potential.window_sum(w)); });
  return std::log(zn / z0) / static_cast<double>(n);
}

double conditional_entropy(const GibbsMeasure& measure) {
  const SftModel& model = measure.model();
  const std::size_t k = measure.transfer().order;
  double h = 0.0;
  for_each_word(model, whole_alphabet(model), k, [&](std::span<const Symbol> w) {
    const double joint = measure.measure(w);
    const double head = measure.measure(w.first(k - 1));
    if (joint > 0.0) h -= joint * std::log(joint / head);
  });
  return h;
}

}  // namespace symdyn::oracle
