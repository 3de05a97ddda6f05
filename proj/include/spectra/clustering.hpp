#pragma once

#include <cstdint>
#include <vector>

#include "spectra/dense.hpp"
#include "spectra/graph.hpp"

namespace spectra {

struct KmeansResult {
  std::vector<int> labels;
  DenseMatrix centers;  // k x dim
  double inertia = 0.0;
};

// Lloyd iterations from k-means++ seeding; best of `restarts` runs by
// inertia.  Deterministic for a given seed.
KmeansResult kmeans(const DenseMatrix& points, std::size_t k, std::size_t restarts,
                    std::uint64_t seed);

struct ClusterResult {
  std::vector<int> labels;
  DenseMatrix embedding;  // n x 2: (Re, Im) of the bottom eigenvector
  double min_eigenvalue = 0.0;
};

// Spectral clustering on the phase structure of the signed magnetic
// Laplacian: embeds each node by the real and imaginary parts of the
// eigenvector for the smallest eigenvalue, then k-means with 50 restarts.
ClusterResult magnetic_cluster(const SignedDiGraph& g, double q, std::size_t k,
                               std::uint64_t seed);

// Adjusted Rand index between two labelings of the same node set.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace spectra
