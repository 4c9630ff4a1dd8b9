#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace symdyn {

/// Symbols are indices 0..size()-1 into the model's label list.
using Symbol = std::size_t;

/// A finite word over the alphabet. Admissibility is a property checked
/// against a model, not baked into the type.
using Word = std::vector<Symbol>;

/// Lexicographic order usable for heterogeneous lookup by span.
struct WordLess {
  using is_transparent = void;
  bool operator()(std::span<const Symbol> a, std::span<const Symbol> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Partition of a strongly connected digraph into cyclic classes: every
/// edge u -> v satisfies class_of[v] == class_of[u] + 1 (mod period).
struct CyclicDecomposition {
  std::size_t period = 1;
  std::vector<std::size_t> class_of;
  std::vector<std::vector<std::size_t>> classes;
};

namespace graph {

using Adjacency = std::vector<std::vector<std::size_t>>;

std::size_t strongly_connected_components(const Adjacency& succ);
bool strongly_connected(const Adjacency& succ);

/// BFS from vertex 0; period = gcd over edges of dist(u) + 1 - dist(v);
/// class 0 holds vertex 0. Throws PreconditionError unless strongly connected.
CyclicDecomposition cyclic_decomposition(const Adjacency& succ);

}  // namespace graph

/// One-sided subshift of finite type: an alphabet and a 0/1 transition matrix.
class SftModel {
 public:
  /// Throws InvalidArgument on an empty alphabet, a non-square matrix, a row
  /// count different from the label count, entries outside {0,1} or
  /// duplicate labels. Irreducibility is not enforced here; see validate().
  SftModel(std::vector<std::string> labels, const std::vector<std::vector<int>>& matrix);

  /// Labels "1".."n", matching the usual 1-based naming of symbols.
  static SftModel from_matrix(const std::vector<std::vector<int>>& matrix);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Symbol s) const { return labels_.at(s); }
  std::optional<Symbol> index_of(const std::string& label) const;

  bool allowed(Symbol from, Symbol to) const { return adj_[from * size() + to] != 0; }
  const std::vector<Symbol>& successors(Symbol s) const { return succ_[s]; }
  const std::vector<Symbol>& predecessors(Symbol s) const { return pred_[s]; }
  const graph::Adjacency& adjacency() const { return succ_; }

  bool admissible(std::span<const Symbol> word) const;
  std::vector<std::vector<int>> matrix() const;

  std::string format_word(std::span<const Symbol> word) const;

  bool operator==(const SftModel& other) const {
    return labels_ == other.labels_ && adj_ == other.adj_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint8_t> adj_;
  graph::Adjacency succ_;
  graph::Adjacency pred_;
};

struct ValidationReport {
  bool irreducible = false;
  bool aperiodic = false;
  std::size_t period = 0;  // 0 when reducible
  std::size_t components = 0;
  std::vector<Symbol> dead_rows;
  std::vector<Symbol> dead_columns;

  /// Irreducible, aperiodic and without dead rows or columns.
  bool ok() const { return irreducible && aperiodic && dead_rows.empty() && dead_columns.empty(); }
};

ValidationReport validate(const SftModel& model);

/// Cyclic classes of an irreducible model. Throws PreconditionError if
/// the model is reducible.
CyclicDecomposition period(const SftModel& model);

/// All admissible words of length n in lexicographic order; empty for n = 0.
std::vector<Word> admissible_words(const SftModel& model, std::size_t n);

/// Number of admissible words of length n (sum of entries of A^{n-1}).
double count_admissible_words(const SftModel& model, std::size_t n);

/// Sub-model on a proper, non-empty subset of the alphabet. Symbols of the
/// result are the members of `delta` in increasing index order.
SftModel restrict(const SftModel& model, std::span<const Symbol> delta);

/// Sorted, de-duplicated copy of delta; throws InvalidArgument on unknown symbols.
std::vector<Symbol> normalize_subset(const SftModel& model, std::span<const Symbol> delta);

/// m-block recoding: symbols are admissible m-words, and block b may be
/// followed by block c iff last(b) -> first(c) is allowed.
struct BlockModel {
  SftModel base;
  std::size_t block_length = 1;
  std::vector<Word> block_symbols;
  SftModel blocks;

  /// Concatenation of the base words of a word over the block alphabet.
  Word expand(std::span<const Symbol> block_word) const;
};

BlockModel block_recode(const SftModel& model, std::size_t m);

}  // namespace symdyn
