#include "spectra/csr.hpp"

#include <algorithm>
#include <cmath>

namespace spectra {

template <typename Scalar>
CsrMatrixT<Scalar> CsrMatrixT<Scalar>::from_triplets(
    std::size_t rows, std::size_t cols,
    std::vector<std::tuple<std::size_t, std::size_t, Scalar>> t) {
  for (const auto& [i, j, v] : t) {
    if (i >= rows || j >= cols) throw DomainError("triplet coordinate out of range");
  }
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  CsrMatrixT m(rows, cols);
  m.col_indices.reserve(t.size());
  m.values.reserve(t.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    while (pos < t.size() && std::get<0>(t[pos]) == i) {
      const std::size_t j = std::get<1>(t[pos]);
      Scalar v = std::get<2>(t[pos]);
      ++pos;
      while (pos < t.size() && std::get<0>(t[pos]) == i && std::get<1>(t[pos]) == j) {
        v += std::get<2>(t[pos]);
        ++pos;
      }
      if (v != Scalar{}) {
        m.col_indices.push_back(j);
        m.values.push_back(v);
      }
    }
    m.row_offsets[i + 1] = m.col_indices.size();
  }
  return m;
}

template <typename Scalar>
CsrMatrixT<Scalar> CsrMatrixT<Scalar>::identity(std::size_t n, Scalar value) {
  CsrMatrixT m(n, n);
  if (value == Scalar{}) return m;
  m.col_indices.resize(n);
  m.values.assign(n, value);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_indices[i] = i;
    m.row_offsets[i + 1] = i + 1;
  }
  return m;
}

template <typename Scalar>
CsrMatrixT<Scalar> CsrMatrixT<Scalar>::transpose() const {
  CsrMatrixT t(n_cols, n_rows);
  std::vector<std::size_t> counts(n_cols, 0);
  for (std::size_t c : col_indices) ++counts[c];
  for (std::size_t j = 0; j < n_cols; ++j) t.row_offsets[j + 1] = t.row_offsets[j] + counts[j];
  t.col_indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
      const std::size_t q = cursor[col_indices[p]]++;
      t.col_indices[q] = i;
      t.values[q] = values[p];
    }
  }
  return t;
}

template <typename Scalar>
double CsrMatrixT<Scalar>::frobenius_norm() const {
  double s = 0.0;
  for (const Scalar& v : values) s += std::norm(std::complex<double>(v));
  return std::sqrt(s);
}

CsrComplexMatrix to_complex(const CsrMatrix& a) {
  CsrComplexMatrix c(a.n_rows, a.n_cols);
  c.row_offsets = a.row_offsets;
  c.col_indices = a.col_indices;
  c.values.assign(a.values.begin(), a.values.end());
  return c;
}

CsrMatrix real_part(const CsrComplexMatrix& a) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      t.emplace_back(i, a.col_indices[p], a.values[p].real());
  return CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(t));
}

CsrMatrix imag_part(const CsrComplexMatrix& a) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      t.emplace_back(i, a.col_indices[p], a.values[p].imag());
  return CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(t));
}

double max_imag_abs(const CsrComplexMatrix& a) {
  double m = 0.0;
  for (const auto& v : a.values) m = std::max(m, std::abs(v.imag()));
  return m;
}

template <typename Scalar>
CsrMatrixT<Scalar> add(const CsrMatrixT<Scalar>& a, const CsrMatrixT<Scalar>& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
    throw DomainError("sparse add: shape mismatch");
  std::vector<std::tuple<std::size_t, std::size_t, Scalar>> t;
  t.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      t.emplace_back(i, a.col_indices[p], a.values[p]);
    for (std::size_t p = b.row_offsets[i]; p < b.row_offsets[i + 1]; ++p)
      t.emplace_back(i, b.col_indices[p], b.values[p]);
  }
  return CsrMatrixT<Scalar>::from_triplets(a.n_rows, a.n_cols, std::move(t));
}

template struct CsrMatrixT<double>;
template struct CsrMatrixT<std::complex<double>>;
template CsrMatrix add(const CsrMatrix&, const CsrMatrix&);
template CsrComplexMatrix add(const CsrComplexMatrix&, const CsrComplexMatrix&);

}  // namespace spectra
