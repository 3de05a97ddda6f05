#include "spectra/splits.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "spectra/errors.hpp"
#include "spectra/rng.hpp"

namespace spectra {

namespace {

template <typename T>
void shuffle_with(std::vector<T>& xs, Rng& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[rng.below(i)]);
}

}  // namespace

NodeSplit split_nodes(const std::vector<int>& labels, double known_ratio, std::uint64_t seed) {
  if (!(known_ratio > 0.0 && known_ratio < 1.0))
    throw DomainError("known_label_ratio must lie in (0, 1)");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(derive_seed(seed, 0x5eed1));
  NodeSplit split;
  std::vector<std::size_t> rest;
  for (auto& [cls, idx] : by_class) {
    const auto k = static_cast<std::size_t>(known_ratio * static_cast<double>(idx.size()));
    if (k == 0)
      throw DomainError("class " + std::to_string(cls) +
                        " has zero training representatives at the requested label ratio");
    shuffle_with(idx, rng);
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<long>(k));
    rest.insert(rest.end(), idx.begin() + static_cast<long>(k), idx.end());
  }
  shuffle_with(rest, rng);
  const auto n_test = static_cast<std::size_t>(0.9 * static_cast<double>(rest.size()));
  split.test.assign(rest.begin(), rest.begin() + static_cast<long>(n_test));
  split.val.assign(rest.begin() + static_cast<long>(n_test), rest.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

std::uint64_t pair_key(std::size_t u, std::size_t v, std::size_t n) {
  const std::size_t a = std::min(u, v), b = std::max(u, v);
  return static_cast<std::uint64_t>(a) * n + b;
}

}  // namespace

EdgeSplit split_edges(const SignedDiGraph& g, double train_ratio, double neg_factor,
                      std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw DomainError("train_edge_ratio must lie in (0, 1)");
  if (neg_factor < 0.0) throw DomainError("neg_sample_factor must be >= 0");

  const std::size_t n = g.n_nodes;
  const CsrMatrix& a = g.adjacency;

  // Enumerate links: every stored arc for directed graphs, each unordered
  // pair once for undirected ones.
  std::vector<LinkTriplet> links;
  std::unordered_set<std::uint64_t> adjacent;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const std::size_t j = a.col_indices[p];
      adjacent.insert(pair_key(i, j, n));
      if (!g.directed && j < i) continue;
      links.push_back({i, j, a.values[p] > 0 ? LinkLabel::positive : LinkLabel::negative});
    }
  }
  if (links.size() < 2) throw DomainError("need at least 2 links to split");

  Rng rng(derive_seed(seed, 0xed6e5));
  shuffle_with(links, rng);
  auto n_train = static_cast<std::size_t>(train_ratio * static_cast<double>(links.size()));
  n_train = std::max<std::size_t>(1, std::min(n_train, links.size() - 1));

  EdgeSplit split;
  split.train.assign(links.begin(), links.begin() + static_cast<long>(n_train));
  split.test.assign(links.begin() + static_cast<long>(n_train), links.end());

  const auto want =
      static_cast<std::size_t>(neg_factor * static_cast<double>(n_train) + 0.5);
  if (want > 0) {
    const std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (all_pairs < adjacent.size() + want)
      throw DomainError("graph too dense to sample " + std::to_string(want) +
                        " non-adjacent pairs");
    std::unordered_set<std::uint64_t> seen;
    while (seen.size() < want) {
      const std::size_t u = rng.below(n), v = rng.below(n);
      if (u == v) continue;
      const std::uint64_t key = pair_key(u, v, n);
      if (adjacent.count(key) || !seen.insert(key).second) continue;
      split.train.push_back({std::min(u, v), std::max(u, v), LinkLabel::none});
    }
  }
  return split;
}

SignedDiGraph propagation_graph(const SignedDiGraph& g, const std::vector<LinkTriplet>& train) {
  std::vector<std::tuple<std::size_t, std::size_t, int>> arcs;
  for (const auto& t : train)
    if (t.label != LinkLabel::none)
      arcs.emplace_back(t.u, t.v, t.label == LinkLabel::positive ? 1 : -1);
  SignedDiGraph sub = graph_from_arcs(g.n_nodes, arcs, g.directed);
  sub.node_ids = g.node_ids;
  return sub;
}

}  // namespace spectra
