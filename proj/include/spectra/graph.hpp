#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "spectra/csr.hpp"

namespace spectra {

// Signed graph with edge signs in {+1, -1}.  Directed graphs store one arc
// per edge; undirected graphs store both orientations so the adjacency
// matrix is symmetric by construction.  Dense node indices are assigned by
// first appearance in the input; original labels are kept for output.
struct SignedDiGraph {
  std::size_t n_nodes = 0;
  bool directed = true;
  CsrMatrix adjacency;                  // n x n, entries +-1
  std::vector<std::int64_t> node_ids;   // dense index -> original label
  std::size_t n_positive = 0;           // links (undirected pairs counted once)
  std::size_t n_negative = 0;

  bool has_negative_edges() const { return n_negative > 0; }
  std::size_t n_links() const { return n_positive + n_negative; }
};

struct LoadReport {
  SignedDiGraph graph;
  std::size_t duplicate_edges = 0;  // later occurrence replaced an earlier one
  std::size_t self_loops = 0;       // dropped
};

// Parses "src dst sign" lines (whitespace or comma separated, '#' comments,
// blank lines ignored).  The sign field is any real; its sign is taken.
// Duplicate (src,dst) pairs: last one wins, counted in the report.
LoadReport load_edge_list(std::istream& in, bool directed);
LoadReport load_edge_list_file(const std::string& path, bool directed);

// Canonical edge-list text: one "src,dst,sign" line per link, sorted by
// (src,dst) original labels; undirected links appear once with src <= dst.
std::string serialize(const SignedDiGraph& g);

// Builds a graph from arcs over dense ids [0, n).  For undirected graphs each
// arc is mirrored.  Signs must be +-1.
SignedDiGraph graph_from_arcs(std::size_t n_nodes,
                              const std::vector<std::tuple<std::size_t, std::size_t, int>>& arcs,
                              bool directed);

// A_s = (A + A^T) / 2.  Symmetric bit-for-bit: entry (i,j) and (j,i) are
// computed from the same two addends.
CsrMatrix symmetrize(const SignedDiGraph& g);

enum class DegreeMode { signed_sum, absolute };

// Row sums of A (signed_sum) or |A| (absolute).
std::vector<double> degrees(const SignedDiGraph& g, DegreeMode mode);

// Row sums of a sparse matrix, signed or absolute; shared by the Laplacian
// builders which derive degrees from derived matrices such as A_s.
std::vector<double> row_sums(const CsrMatrix& m, DegreeMode mode);

struct DropIsolatedReport {
  SignedDiGraph graph;
  std::size_t n_dropped = 0;
};

// Removes nodes with no incident arcs and relabels the rest compactly,
// preserving order.
DropIsolatedReport drop_isolated_nodes(const SignedDiGraph& g);

std::vector<std::size_t> isolated_nodes(const SignedDiGraph& g);

// Two-cluster signed stochastic block model: intra-cluster pairs draw a
// positive edge with p_intra, inter-cluster pairs a negative edge with
// p_inter; each edge sign then flips with flip_prob.  Candidate pairs are
// every ordered pair when directed, each unordered pair once otherwise.
struct SsbmParams {
  std::size_t nodes_per_cluster = 0;
  double p_intra = 0.0;
  double p_inter = 0.0;
  double flip_prob = 0.0;
  bool directed = false;
};

struct SsbmResult {
  SignedDiGraph graph;
  std::vector<int> labels;  // cluster index per node
};

SsbmResult ssbm_generate(const SsbmParams& params, std::uint64_t seed);

}  // namespace spectra
