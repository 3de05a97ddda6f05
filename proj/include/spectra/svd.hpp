#pragma once

#include <cstdint>
#include <vector>

#include "spectra/csr.hpp"
#include "spectra/dense.hpp"

namespace spectra {

struct TruncatedSvd {
  DenseMatrix features;                 // n_rows x d: U_d * diag(sigma)
  std::vector<double> singular_values;  // descending, length d
  std::size_t rank = 0;                 // columns actually carrying signal
};

// Randomized truncated SVD: Gaussian range finder with oversampling 10 and
// two power iterations, Rayleigh-Ritz on the projected matrix.  Deterministic
// for a given seed.  Columns past the numerical rank are zero-filled; the
// caller can compare rank against d to warn.
TruncatedSvd truncated_svd(const CsrMatrix& m, std::size_t d, std::uint64_t seed);

// Orthonormalizes the columns of y in place (modified Gram-Schmidt, two
// passes). Columns that vanish are left as zeros.
void orthonormalize_columns(DenseMatrix& y);

}  // namespace spectra
