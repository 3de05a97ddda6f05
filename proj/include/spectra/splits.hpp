#pragma once

#include <cstdint>
#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

struct NodeSplit {
  std::vector<std::size_t> train, val, test;
};

// Stratified: floor(known_ratio * count) training nodes per class (error if
// any class gets zero); of the remaining nodes, 90% test and the rest
// validation.  Deterministic in (labels, seed).
NodeSplit split_nodes(const std::vector<int>& labels, double known_ratio, std::uint64_t seed);

enum class LinkLabel : int { positive = 0, negative = 1, none = 2 };

struct LinkTriplet {
  std::size_t u, v;
  LinkLabel label;
};

struct EdgeSplit {
  std::vector<LinkTriplet> train;  // +/- links plus sampled no-link pairs
  std::vector<LinkTriplet> test;   // only true +/- links
};

// floor(train_ratio * links) random links for training, the rest for test;
// train gets neg_factor * |train links| no-link pairs sampled uniformly from
// unordered non-adjacent pairs (neither direction an edge, no self pairs).
EdgeSplit split_edges(const SignedDiGraph& g, double train_ratio, double neg_factor,
                      std::uint64_t seed);

// The training-edge subgraph (test links removed) used to build propagation
// operators without test leakage.  Node count and ids are preserved.
SignedDiGraph propagation_graph(const SignedDiGraph& g, const std::vector<LinkTriplet>& train);

}  // namespace spectra
