#include "spectra/laplacian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

using Complex = std::complex<double>;

std::string node_label(const SignedDiGraph& g, std::size_t i) {
  return i < g.node_ids.size() ? std::to_string(g.node_ids[i]) : std::to_string(i);
}

// Inverse square roots of the degree vector; throws naming the offending
// node when a degree is nonpositive.
std::vector<double> inv_sqrt_degrees(const SignedDiGraph& g, const std::vector<double>& deg,
                                     const char* what) {
  std::vector<double> inv(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] <= 0.0)
      throw DomainError(std::string("cannot normalize: node ") + node_label(g, i) + " has " +
                        what + " degree " + std::to_string(deg[i]));
    inv[i] = 1.0 / std::sqrt(deg[i]);
  }
  return inv;
}

// Complex adjacency A_s .* Phi^q.  Each unordered pair is evaluated once and
// written to both orientations with conjugate values, making the result
// Hermitian bit-for-bit.
CsrComplexMatrix phased_adjacency(const SignedDiGraph& g, const CsrMatrix& as, double q) {
  const CsrMatrix& a = g.adjacency;
  std::vector<std::tuple<std::size_t, std::size_t, Complex>> t;
  t.reserve(as.nnz());
  for (std::size_t i = 0; i < as.n_rows; ++i) {
    for (std::size_t p = as.row_offsets[i]; p < as.row_offsets[i + 1]; ++p) {
      const std::size_t j = as.col_indices[p];
      if (j < i) continue;  // handled from the other side
      const double sym = as.values[p];
      const double delta = a.coeff(i, j) - a.coeff(j, i);
      const double theta = 2.0 * std::numbers::pi * q * delta;
      const Complex v = sym * Complex(std::cos(theta), std::sin(theta));
      t.emplace_back(i, j, v);
      if (j != i) t.emplace_back(j, i, std::conj(v));
    }
  }
  return CsrComplexMatrix::from_triplets(as.n_rows, as.n_cols, std::move(t));
}

template <typename Scalar>
CsrMatrixT<Scalar> subtract_from_degree(const CsrMatrixT<Scalar>& adj,
                                        const std::vector<double>& deg) {
  std::vector<std::tuple<std::size_t, std::size_t, Scalar>> t;
  t.reserve(adj.nnz() + adj.n_rows);
  for (std::size_t i = 0; i < adj.n_rows; ++i) t.emplace_back(i, i, Scalar{deg[i]});
  for (std::size_t i = 0; i < adj.n_rows; ++i)
    for (std::size_t p = adj.row_offsets[i]; p < adj.row_offsets[i + 1]; ++p)
      t.emplace_back(i, adj.col_indices[p], -adj.values[p]);
  return CsrMatrixT<Scalar>::from_triplets(adj.n_rows, adj.n_cols, std::move(t));
}

// Normalized Laplacian assembled entrywise: unit diagonal (no self-loops),
// off-diagonal -adj(i,j) * inv_i * inv_j.
template <typename Scalar>
CsrMatrixT<Scalar> normalized_laplacian(const CsrMatrixT<Scalar>& adj,
                                        const std::vector<double>& inv) {
  std::vector<std::tuple<std::size_t, std::size_t, Scalar>> t;
  t.reserve(adj.nnz() + adj.n_rows);
  for (std::size_t i = 0; i < adj.n_rows; ++i) t.emplace_back(i, i, Scalar{1.0});
  for (std::size_t i = 0; i < adj.n_rows; ++i)
    for (std::size_t p = adj.row_offsets[i]; p < adj.row_offsets[i + 1]; ++p) {
      const std::size_t j = adj.col_indices[p];
      if (j == i) continue;  // folded into the unit diagonal by convention
      t.emplace_back(i, j, -adj.values[p] * (inv[i] * inv[j]));
    }
  return CsrMatrixT<Scalar>::from_triplets(adj.n_rows, adj.n_cols, std::move(t));
}

void validate_q(const SignedDiGraph& g, const LaplacianKind& kind) {
  if (!is_magnetic(kind.family)) {
    if (kind.q.has_value())
      throw DomainError(std::string("phase parameter q does not apply to the ") +
                        family_name(kind.family) + " family");
    return;
  }
  if (!kind.q.has_value())
    throw DomainError(std::string(family_name(kind.family)) +
                      " family requires the phase parameter q");
  const double q = *kind.q;
  double bound = kind.family == LaplacianFamily::SignedMagnetic ? 0.25 : 0.5;
  const char* reason = "";
  if (kind.family == LaplacianFamily::Magnetic && g.has_negative_edges()) {
    bound = 0.25;  // signed entries double the phase angles
    reason = " (signed input requires q < 0.25)";
  }
  if (q < 0.0 || q >= bound)
    throw DomainError("phase parameter q=" + std::to_string(q) + " outside [0, " +
                      std::to_string(bound) + ")" + reason);
}

}  // namespace

bool is_magnetic(LaplacianFamily f) {
  return f == LaplacianFamily::Magnetic || f == LaplacianFamily::SignedMagnetic;
}

const char* family_name(LaplacianFamily f) {
  switch (f) {
    case LaplacianFamily::Combinatorial: return "combinatorial";
    case LaplacianFamily::Signed: return "signed";
    case LaplacianFamily::Magnetic: return "magnetic";
    case LaplacianFamily::SignedMagnetic: return "signed-magnetic";
  }
  return "?";
}

CsrMatrix laplacian_from_adjacency(const CsrMatrix& adj, DegreeMode mode, bool normalized) {
  const std::vector<double> deg = row_sums(adj, mode);
  if (!normalized) return subtract_from_degree(adj, deg);
  std::vector<double> inv(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] <= 0.0)
      throw DomainError("cannot normalize: node " + std::to_string(i) + " has degree " +
                        std::to_string(deg[i]));
    inv[i] = 1.0 / std::sqrt(deg[i]);
  }
  return normalized_laplacian(adj, inv);
}

SparseHermitian build_laplacian(const SignedDiGraph& g, const LaplacianKind& kind) {
  validate_q(g, kind);
  const bool absolute = kind.family == LaplacianFamily::Signed ||
                        kind.family == LaplacianFamily::SignedMagnetic;
  const DegreeMode mode = absolute ? DegreeMode::absolute : DegreeMode::signed_sum;
  const char* what = absolute ? "absolute" : "signed";

  if (!is_magnetic(kind.family)) {
    const CsrMatrix& a = g.adjacency;
    const std::vector<double> deg = row_sums(a, mode);
    if (!kind.normalized) return subtract_from_degree(a, deg);
    return normalized_laplacian(a, inv_sqrt_degrees(g, deg, what));
  }

  const CsrMatrix as = symmetrize(g);
  const CsrComplexMatrix aq = phased_adjacency(g, as, *kind.q);
  const std::vector<double> deg = row_sums(as, mode);
  if (!kind.normalized) return subtract_from_degree(aq, deg);
  return normalized_laplacian(aq, inv_sqrt_degrees(g, deg, what));
}

CsrMatrix renormalized_propagation(const SignedDiGraph& g) {
  const CsrMatrix& a = g.adjacency;
  std::vector<double> deg = degrees(g, DegreeMode::absolute);
  std::vector<double> inv(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) inv[i] = 1.0 / std::sqrt(deg[i] + 1.0);
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(a.nnz() + a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i) t.emplace_back(i, i, inv[i] * inv[i]);
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const std::size_t j = a.col_indices[p];
      if (j == i) continue;
      t.emplace_back(i, j, a.values[p] * (inv[i] * inv[j]));
    }
  return CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(t));
}

CsrComplexMatrix renormalized_propagation_complex(const SignedDiGraph& g, double q) {
  double bound = g.has_negative_edges() ? 0.25 : 0.5;
  if (q < 0.0 || q >= bound)
    throw DomainError("phase parameter q=" + std::to_string(q) + " outside [0, " +
                      std::to_string(bound) + ")");
  const CsrMatrix as = symmetrize(g);
  const CsrComplexMatrix aq = phased_adjacency(g, as, q);
  const std::vector<double> deg = row_sums(as, DegreeMode::absolute);
  std::vector<double> inv(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) inv[i] = 1.0 / std::sqrt(deg[i] + 1.0);
  std::vector<std::tuple<std::size_t, std::size_t, Complex>> t;
  t.reserve(aq.nnz() + aq.n_rows);
  for (std::size_t i = 0; i < aq.n_rows; ++i) t.emplace_back(i, i, Complex{inv[i] * inv[i]});
  for (std::size_t i = 0; i < aq.n_rows; ++i)
    for (std::size_t p = aq.row_offsets[i]; p < aq.row_offsets[i + 1]; ++p) {
      const std::size_t j = aq.col_indices[p];
      if (j == i) continue;
      t.emplace_back(i, j, aq.values[p] * (inv[i] * inv[j]));
    }
  return CsrComplexMatrix::from_triplets(aq.n_rows, aq.n_cols, std::move(t));
}

PassFilters pass_filters(const SignedDiGraph& g) {
  if (g.directed)
    throw DomainError("low/high-pass filter pair requires an undirected graph");
  const CsrMatrix& a = g.adjacency;
  const std::vector<double> deg = degrees(g, DegreeMode::absolute);
  const std::vector<double> inv = inv_sqrt_degrees(g, deg, "absolute");

  std::vector<std::tuple<std::size_t, std::size_t, double>> lo, hi;
  lo.reserve(a.nnz() + a.n_rows);
  hi.reserve(a.nnz() + a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    lo.emplace_back(i, i, 1.0);
    hi.emplace_back(i, i, 1.0);
  }
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const std::size_t j = a.col_indices[p];
      if (j == i) continue;
      const double v = a.values[p] * (inv[i] * inv[j]);
      lo.emplace_back(i, j, v);
      hi.emplace_back(i, j, -v);
    }
  PassFilters f;
  f.low = CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(lo));
  f.high = CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(hi));
  return f;
}

}  // namespace spectra
