#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spectra/errors.hpp"

namespace spectra {

// Row-major dense matrix.  Deliberately minimal: the heavy lifting lives in
// the sparse types; dense matrices back the eigensolvers and test oracles.
template <typename Scalar>
struct DenseMatrixT {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Scalar> data;

  DenseMatrixT() = default;
  DenseMatrixT(std::size_t rows, std::size_t cols)
      : n_rows(rows), n_cols(cols), data(rows * cols, Scalar{}) {}

  Scalar& at(std::size_t i, std::size_t j) { return data[i * n_cols + j]; }
  const Scalar& at(std::size_t i, std::size_t j) const { return data[i * n_cols + j]; }

  static DenseMatrixT identity(std::size_t n) {
    DenseMatrixT m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar{1};
    return m;
  }

  DenseMatrixT transpose() const {
    DenseMatrixT t(n_cols, n_rows);
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_cols; ++j) t.at(j, i) = at(i, j);
    return t;
  }
};

using DenseMatrix = DenseMatrixT<double>;
using DenseComplexMatrix = DenseMatrixT<std::complex<double>>;

template <typename Scalar>
DenseMatrixT<Scalar> matmul(const DenseMatrixT<Scalar>& a, const DenseMatrixT<Scalar>& b) {
  if (a.n_cols != b.n_rows) throw DomainError("dense matmul: inner dimensions disagree");
  DenseMatrixT<Scalar> c(a.n_rows, b.n_cols);
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    for (std::size_t k = 0; k < a.n_cols; ++k) {
      const Scalar aik = a.at(i, k);
      if (aik == Scalar{}) continue;
      const Scalar* brow = &b.data[k * b.n_cols];
      Scalar* crow = &c.data[i * c.n_cols];
      for (std::size_t j = 0; j < b.n_cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

inline DenseComplexMatrix to_complex(const DenseMatrix& a) {
  DenseComplexMatrix c(a.n_rows, a.n_cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) c.data[i] = a.data[i];
  return c;
}

inline DenseComplexMatrix conjugate_transpose(const DenseComplexMatrix& a) {
  DenseComplexMatrix t(a.n_cols, a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t j = 0; j < a.n_cols; ++j) t.at(j, i) = std::conj(a.at(i, j));
  return t;
}

}  // namespace spectra
