#include "symdyn/sft.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "symdyn/errors.hpp"
#include "symdyn/matrix.hpp"

namespace symdyn {

namespace graph {

namespace {

Adjacency reversed(const Adjacency& succ) {
  Adjacency pred(succ.size());
  for (std::size_t u = 0; u < succ.size(); ++u)
    for (std::size_t v : succ[u]) pred[v].push_back(u);
  return pred;
}

}  // namespace

std::size_t strongly_connected_components(const Adjacency& succ) {
  // Kosaraju, iterative.
  const std::size_t n = succ.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < succ[u].size()) {
        const std::size_t v = succ[u][next++];
        if (!seen[v]) {
          seen[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }
  const Adjacency pred = reversed(succ);
  std::vector<char> assigned(n, 0);
  std::size_t components = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (assigned[*it]) continue;
    ++components;
    std::vector<std::size_t> stack{*it};
    assigned[*it] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : pred[u])
        if (!assigned[v]) {
          assigned[v] = 1;
          stack.push_back(v);
        }
    }
  }
  return components;
}

bool strongly_connected(const Adjacency& succ) {
  // A lone vertex only counts when it carries a loop.
  if (succ.size() == 1) return !succ[0].empty();
  return !succ.empty() && strongly_connected_components(succ) == 1;
}

CyclicDecomposition cyclic_decomposition(const Adjacency& succ) {
  if (!strongly_connected(succ))
    throw PreconditionError("graph is not strongly connected (reducible matrix)");
  const std::size_t n = succ.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(n, kUnset);
  std::queue<std::size_t> queue;
  dist[0] = 0;
  queue.push(0);
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop();
    for (std::size_t v : succ[u])
      if (dist[v] == kUnset) {
        dist[v] = dist[u] + 1;
        queue.push(v);
      }
  }
  std::size_t g = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : succ[u]) {
      const auto diff = static_cast<long long>(dist[u]) + 1 - static_cast<long long>(dist[v]);
      g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
    }
  CyclicDecomposition out;
  out.period = g == 0 ? 1 : g;
  out.class_of.resize(n);
  out.classes.assign(out.period, {});
  for (std::size_t u = 0; u < n; ++u) {
    out.class_of[u] = dist[u] % out.period;
    out.classes[out.class_of[u]].push_back(u);
  }
  return out;
}

}  // namespace graph

SftModel::SftModel(std::vector<std::string> labels, const std::vector<std::vector<int>>& matrix)
    : labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw InvalidArgument("empty alphabet");
  if (matrix.size() != n)
    throw InvalidArgument("transition matrix has " + std::to_string(matrix.size()) +
                          " rows but the alphabet has " + std::to_string(n) + " symbols");
  std::set<std::string> unique(labels_.begin(), labels_.end());
  if (unique.size() != n) throw InvalidArgument("duplicate symbol labels");
  adj_.assign(n * n, 0);
  succ_.assign(n, {});
  pred_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw InvalidArgument("transition matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      const int entry = matrix[i][j];
      if (entry != 0 && entry != 1)
        throw InvalidArgument("transition matrix entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is not 0 or 1");
      if (entry == 1) {
        adj_[i * n + j] = 1;
        succ_[i].push_back(j);
        pred_[j].push_back(i);
      }
    }
  }
}

SftModel SftModel::from_matrix(const std::vector<std::vector<int>>& matrix) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < matrix.size(); ++i) labels.push_back(std::to_string(i + 1));
  return SftModel(std::move(labels), matrix);
}

std::optional<Symbol> SftModel::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Symbol>(it - labels_.begin());
}

bool SftModel::admissible(std::span<const Symbol> word) const {
  for (Symbol s : word)
    if (s >= size()) return false;
  for (std::size_t t = 1; t < word.size(); ++t)
    if (!allowed(word[t - 1], word[t])) return false;
  return true;
}

std::vector<std::vector<int>> SftModel::matrix() const {
  const std::size_t n = size();
  std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = adj_[i * n + j];
  return rows;
}

std::string SftModel::format_word(std::span<const Symbol> word) const {
  const bool compact =
      std::all_of(labels_.begin(), labels_.end(), [](const auto& l) { return l.size() == 1; });
  std::string out;
  for (std::size_t t = 0; t < word.size(); ++t) {
    if (!compact && t > 0) out += '.';
    out += label(word[t]);
  }
  return out;
}

ValidationReport validate(const SftModel& model) {
  ValidationReport report;
  const std::size_t n = model.size();
  for (Symbol s = 0; s < n; ++s) {
    if (model.successors(s).empty()) report.dead_rows.push_back(s);
    if (model.predecessors(s).empty()) report.dead_columns.push_back(s);
  }
  report.components = graph::strongly_connected_components(model.adjacency());
  report.irreducible = graph::strongly_connected(model.adjacency());
  if (report.irreducible) {
    report.period = graph::cyclic_decomposition(model.adjacency()).period;
    report.aperiodic = report.period == 1;
  }
  return report;
}

CyclicDecomposition period(const SftModel& model) {
  return graph::cyclic_decomposition(model.adjacency());
}

std::vector<Word> admissible_words(const SftModel& model, std::size_t n) {
  std::vector<Word> out;
  if (n == 0) return out;
  Word word;
  word.reserve(n);
  // Depth-first extension; successor lists are sorted, so output is lexicographic.
  auto extend = [&](auto&& self) -> void {
    if (word.size() == n) {
      out.push_back(word);
      return;
    }
    if (word.empty()) {
      for (Symbol s = 0; s < model.size(); ++s) {
        word.push_back(s);
        self(self);
        word.pop_back();
      }
      return;
    }
    for (Symbol s : model.successors(word.back())) {
      word.push_back(s);
      self(self);
      word.pop_back();
    }
  };
  extend(extend);
  return out;
}

double count_admissible_words(const SftModel& model, std::size_t n) {
  if (n == 0) return 0.0;
  const std::size_t size = model.size();
  DenseMatrix a(size, size);
  for (Symbol i = 0; i < size; ++i)
    for (Symbol j : model.successors(i)) a(i, j) = 1.0;
  const DenseMatrix p = a.power(n - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) total += p(i, j);
  return total;
}

std::vector<Symbol> normalize_subset(const SftModel& model, std::span<const Symbol> delta) {
  std::vector<Symbol> sorted(delta.begin(), delta.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Symbol s : sorted)
    if (s >= model.size())
      throw InvalidArgument("sub-alphabet contains unknown symbol index " + std::to_string(s));
  return sorted;
}

SftModel restrict(const SftModel& model, std::span<const Symbol> delta) {
  const std::vector<Symbol> subset = normalize_subset(model, delta);
  if (subset.empty()) throw InvalidArgument("sub-alphabet is empty");
  if (subset.size() == model.size())
    throw InvalidArgument("sub-alphabet must be a proper subset of the alphabet");
  std::vector<std::string> labels;
  std::vector<std::vector<int>> rows(subset.size(), std::vector<int>(subset.size(), 0));
  for (std::size_t a = 0; a < subset.size(); ++a) {
    labels.push_back(model.label(subset[a]));
    for (std::size_t b = 0; b < subset.size(); ++b)
      rows[a][b] = model.allowed(subset[a], subset[b]) ? 1 : 0;
  }
  return SftModel(std::move(labels), rows);
}

Word BlockModel::expand(std::span<const Symbol> block_word) const {
  Word out;
  out.reserve(block_word.size() * block_length);
  for (Symbol b : block_word) {
    const Word& piece = block_symbols.at(b);
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return out;
}

BlockModel block_recode(const SftModel& model, std::size_t m) {
  if (m == 0) throw InvalidArgument("block length must be at least 1");
  std::vector<Word> symbols = admissible_words(model, m);
  std::vector<std::string> labels;
  labels.reserve(symbols.size());
  for (const Word& w : symbols) labels.push_back(model.format_word(w));
  std::vector<std::vector<int>> rows(symbols.size(), std::vector<int>(symbols.size(), 0));
  for (std::size_t a = 0; a < symbols.size(); ++a)
    for (std::size_t b = 0; b < symbols.size(); ++b)
      rows[a][b] = model.allowed(symbols[a].back(), symbols[b].front()) ? 1 : 0;
  SftModel blocks(std::move(labels), rows);
  return BlockModel{model, m, std::move(symbols), std::move(blocks)};
}

}  // namespace symdyn
