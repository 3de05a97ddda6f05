#include "spectra/svd.hpp"

#include <algorithm>
#include <cmath>

#include "spectra/eig.hpp"
#include "spectra/errors.hpp"
#include "spectra/rng.hpp"

namespace spectra {

void orthonormalize_columns(DenseMatrix& y) {
  const std::size_t n = y.n_rows, r = y.n_cols;
  for (std::size_t j = 0; j < r; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        double dot = 0.0;
        for (std::size_t row = 0; row < n; ++row) dot += y.at(row, i) * y.at(row, j);
        if (dot == 0.0) continue;
        for (std::size_t row = 0; row < n; ++row) y.at(row, j) -= dot * y.at(row, i);
      }
    }
    double norm2 = 0.0;
    for (std::size_t row = 0; row < n; ++row) norm2 += y.at(row, j) * y.at(row, j);
    const double norm = std::sqrt(norm2);
    if (norm < 1e-150) {
      for (std::size_t row = 0; row < n; ++row) y.at(row, j) = 0.0;  // rank deficient
    } else {
      const double inv = 1.0 / norm;
      for (std::size_t row = 0; row < n; ++row) y.at(row, j) *= inv;
    }
  }
}

TruncatedSvd truncated_svd(const CsrMatrix& m, std::size_t d, std::uint64_t seed) {
  const std::size_t rows = m.n_rows, cols = m.n_cols;
  if (d > std::min(rows, cols))
    throw DomainError("requested rank exceeds the smaller matrix dimension");
  TruncatedSvd out;
  out.features = DenseMatrix(rows, d);
  out.singular_values.assign(d, 0.0);
  if (d == 0 || rows == 0 || cols == 0) return out;

  const std::size_t r = std::min(d + 10, std::min(rows, cols));
  const CsrMatrix mt = m.transpose();

  Rng rng(derive_seed(seed, 0x51d));
  DenseMatrix omega(cols, r);
  for (auto& x : omega.data) x = rng.normal();

  DenseMatrix y(rows, r);
  m.multiply(omega.data.data(), r, y.data.data());
  orthonormalize_columns(y);

  // Two power iterations stabilized by re-orthonormalization.
  DenseMatrix z(cols, r);
  for (int it = 0; it < 2; ++it) {
    mt.multiply(y.data.data(), r, z.data.data());
    orthonormalize_columns(z);
    m.multiply(z.data.data(), r, y.data.data());
    orthonormalize_columns(y);
  }

  // B = Q^T A computed as (A^T Q)^T; Rayleigh-Ritz on G = B B^T.
  DenseMatrix bt(cols, r);
  mt.multiply(y.data.data(), r, bt.data.data());
  DenseMatrix g(r, r);
  for (std::size_t row = 0; row < cols; ++row)
    for (std::size_t a = 0; a < r; ++a) {
      const double va = bt.at(row, a);
      if (va == 0.0) continue;
      for (std::size_t b = 0; b < r; ++b) g.at(a, b) += va * bt.at(row, b);
    }

  Spectrum es = dense_hermitian_eig(g);

  // Largest d eigenvalues of G are the squared singular values.
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t src = r - 1 - c;  // descending
    const double lambda = es.eigenvalues[src];
    const double sigma = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
    out.singular_values[c] = sigma;
    for (std::size_t row = 0; row < rows; ++row) {
      double acc = 0.0;
      for (std::size_t j = 0; j < r; ++j) acc += y.at(row, j) * es.vectors_real.at(j, src);
      out.features.at(row, c) = acc * sigma;
    }
  }

  const double cutoff = out.singular_values.empty()
                            ? 0.0
                            : out.singular_values.front() * 1e-12;
  out.rank = 0;
  for (std::size_t c = 0; c < d; ++c) {
    if (out.singular_values[c] > cutoff && out.singular_values[c] > 0.0) {
      ++out.rank;
    } else {
      out.singular_values[c] = 0.0;
      for (std::size_t row = 0; row < rows; ++row) out.features.at(row, c) = 0.0;
    }
  }
  return out;
}

}  // namespace spectra
