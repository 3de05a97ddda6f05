#pragma once

#include <complex>
#include <cstddef>
#include <tuple>
#include <vector>

#include "spectra/dense.hpp"
#include "spectra/errors.hpp"

namespace spectra {

// Compressed sparse row matrix.  Invariants: column indices strictly
// ascending within each row, no explicitly stored zeros.
template <typename Scalar>
struct CsrMatrixT {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // size n_rows + 1
  std::vector<std::size_t> col_indices;
  std::vector<Scalar> values;

  CsrMatrixT() : row_offsets(1, 0) {}
  CsrMatrixT(std::size_t rows, std::size_t cols)
      : n_rows(rows), n_cols(cols), row_offsets(rows + 1, 0) {}

  std::size_t nnz() const { return values.size(); }

  // Builds from (row, col, value) triplets; duplicate coordinates are summed,
  // zero results dropped.
  static CsrMatrixT from_triplets(std::size_t rows, std::size_t cols,
                                  std::vector<std::tuple<std::size_t, std::size_t, Scalar>> t);

  static CsrMatrixT identity(std::size_t n, Scalar value = Scalar{1});

  CsrMatrixT transpose() const;

  // y = this * x where x is a dense row-major (n_cols x width) block.
  template <typename XScalar>
  void multiply(const XScalar* x, std::size_t width,
                decltype(Scalar{} * XScalar{})* y) const {
    using Out = decltype(Scalar{} * XScalar{});
    for (std::size_t i = 0; i < n_rows; ++i) {
      Out* yrow = y + i * width;
      for (std::size_t j = 0; j < width; ++j) yrow[j] = Out{};
      for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
        const Scalar v = values[p];
        const XScalar* xrow = x + col_indices[p] * width;
        for (std::size_t j = 0; j < width; ++j) yrow[j] += v * xrow[j];
      }
    }
  }

  template <typename XScalar>
  std::vector<decltype(Scalar{} * XScalar{})> multiply(const std::vector<XScalar>& x) const {
    if (x.size() != n_cols) throw DomainError("sparse multiply: dimension mismatch");
    std::vector<decltype(Scalar{} * XScalar{})> y(n_rows);
    multiply(x.data(), 1, y.data());
    return y;
  }

  Scalar coeff(std::size_t i, std::size_t j) const {
    for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
      if (col_indices[p] == j) return values[p];
      if (col_indices[p] > j) break;
    }
    return Scalar{};
  }

  DenseMatrixT<Scalar> to_dense() const {
    DenseMatrixT<Scalar> d(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
        d.at(i, col_indices[p]) = values[p];
    return d;
  }

  double frobenius_norm() const;

  bool same_pattern(const CsrMatrixT& o) const {
    return n_rows == o.n_rows && n_cols == o.n_cols && row_offsets == o.row_offsets &&
           col_indices == o.col_indices;
  }
};

using CsrMatrix = CsrMatrixT<double>;
using CsrComplexMatrix = CsrMatrixT<std::complex<double>>;

CsrComplexMatrix to_complex(const CsrMatrix& a);
CsrMatrix real_part(const CsrComplexMatrix& a);
CsrMatrix imag_part(const CsrComplexMatrix& a);
double max_imag_abs(const CsrComplexMatrix& a);

// a + b with matching shapes.
template <typename Scalar>
CsrMatrixT<Scalar> add(const CsrMatrixT<Scalar>& a, const CsrMatrixT<Scalar>& b);

extern template struct CsrMatrixT<double>;
extern template struct CsrMatrixT<std::complex<double>>;

}  // namespace spectra
