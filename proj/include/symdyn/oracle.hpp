#pragma once

// Deliberately naive reference computations. Nothing here goes through the
// restricted-operator matrices; tests compare these against the main route.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "symdyn/sft.hpp"
#include "symdyn/transfer.hpp"

namespace symdyn::oracle {

/// Sum of mu[w] over every admissible length-n word with all symbols in
/// delta, by enumeration. Returns 1 for n = 0. Throws InvalidArgument
/// when the number of such words exceeds config::kEnumerationBudget.
double brute_mu_delta_n(const SftModel& model, const GibbsMeasure& measure,
                        std::span<const Symbol> delta, std::size_t n);

using PointFunction = std::function<double(std::span<const Symbol>)>;

/// (L psi)(x) = sum over symbols i with A(i, x_0) = 1 of exp(phi(i x)) psi(i x),
/// where x_word is a prefix of x long enough for phi and psi (at least
/// order - 1 symbols) and psi is evaluated on the prepended word.
double brute_apply(const CylindricalPotential& potential, const PointFunction& psi,
                   std::span<const Symbol> x_word);

/// (1/n) log(Z_n / Z_0) with Z_n = sum of exp(S_n phi(w)) over admissible
/// words w of length n + order - 1 (inside delta when given), Z_0 the
/// number of admissible (order-1)-words.
double finite_pressure_estimate(const CylindricalPotential& potential,
                                std::optional<std::vector<Symbol>> delta, std::size_t n);

/// Entropy of the (order-1)-step Markov measure computed directly from
/// cylinder measures: -sum over order-words w of mu[w] log(mu[w] / mu[w_0..w_{k-2}]).
double conditional_entropy(const GibbsMeasure& measure);

}  // namespace symdyn::oracle
