#include "spectra/fourier.hpp"

#include <cmath>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

using Complex = std::complex<double>;

double abs_max_eigenvalue(const Spectrum& s) {
  double m = 0.0;
  for (double v : s.eigenvalues) m = std::max(m, std::abs(v));
  return m;
}

void require_real(const Spectrum& s) {
  if (s.complex_flavor)
    throw DomainError("real signal requires a real spectrum; use the complex overload");
}

void require_complex(const Spectrum& s) {
  if (!s.complex_flavor)
    throw DomainError("complex signal requires a complex spectrum; use the real overload");
}

}  // namespace

double FilterResponse::evaluate(double lambda, double lambda_abs_max) const {
  switch (kind) {
    case Kind::low_pass_2_minus_lambda:
      return 2.0 - lambda;
    case Kind::high_pass_lambda:
      return lambda;
    case Kind::abs_normalized:
      if (lambda_abs_max <= 0.0) return 1.0;  // null spectrum: flat response
      return 1.0 - std::abs(lambda) / lambda_abs_max;
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * lambda + coeffs[i];
      return acc;
    }
  }
  return 0.0;
}

std::vector<double> gft(const Spectrum& s, const std::vector<double>& x) {
  require_real(s);
  const DenseMatrix& u = s.vectors_real;
  if (x.size() != u.n_rows) throw DomainError("signal length does not match spectrum");
  std::vector<double> xhat(u.n_cols, 0.0);
  for (std::size_t k = 0; k < u.n_cols; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.n_rows; ++i) acc += u.at(i, k) * x[i];
    xhat[k] = acc;
  }
  return xhat;
}

std::vector<Complex> gft(const Spectrum& s, const std::vector<Complex>& x) {
  require_complex(s);
  const DenseComplexMatrix& u = s.vectors_complex;
  if (x.size() != u.n_rows) throw DomainError("signal length does not match spectrum");
  std::vector<Complex> xhat(u.n_cols);
  for (std::size_t k = 0; k < u.n_cols; ++k) {
    Complex acc{};
    for (std::size_t i = 0; i < u.n_rows; ++i) acc += std::conj(u.at(i, k)) * x[i];
    xhat[k] = acc;
  }
  return xhat;
}

std::vector<double> igft(const Spectrum& s, const std::vector<double>& xhat) {
  require_real(s);
  const DenseMatrix& u = s.vectors_real;
  if (xhat.size() != u.n_cols) throw DomainError("coefficient length does not match spectrum");
  std::vector<double> x(u.n_rows, 0.0);
  for (std::size_t k = 0; k < u.n_cols; ++k)
    for (std::size_t i = 0; i < u.n_rows; ++i) x[i] += u.at(i, k) * xhat[k];
  return x;
}

std::vector<Complex> igft(const Spectrum& s, const std::vector<Complex>& xhat) {
  require_complex(s);
  const DenseComplexMatrix& u = s.vectors_complex;
  if (xhat.size() != u.n_cols) throw DomainError("coefficient length does not match spectrum");
  std::vector<Complex> x(u.n_rows);
  for (std::size_t k = 0; k < u.n_cols; ++k)
    for (std::size_t i = 0; i < u.n_rows; ++i) x[i] += u.at(i, k) * xhat[k];
  return x;
}

std::vector<double> spectral_filter_apply(const Spectrum& s, const FilterResponse& g,
                                          const std::vector<double>& x) {
  const double lam_max = abs_max_eigenvalue(s);
  std::vector<double> xhat = gft(s, x);
  for (std::size_t k = 0; k < xhat.size(); ++k) xhat[k] *= g.evaluate(s.eigenvalues[k], lam_max);
  return igft(s, xhat);
}

std::vector<Complex> spectral_filter_apply(const Spectrum& s, const FilterResponse& g,
                                           const std::vector<Complex>& x) {
  const double lam_max = abs_max_eigenvalue(s);
  std::vector<Complex> xhat = gft(s, x);
  for (std::size_t k = 0; k < xhat.size(); ++k) xhat[k] *= g.evaluate(s.eigenvalues[k], lam_max);
  return igft(s, xhat);
}

double tv_quadratic(const CsrMatrix& l, const std::vector<double>& x) {
  const std::vector<double> y = l.multiply(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double tv_quadratic(const CsrComplexMatrix& l, const std::vector<Complex>& x) {
  const std::vector<Complex> y = l.multiply(x);
  Complex acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc.real();
}

double tv_l1(const CsrMatrix& l, const std::vector<double>& x) {
  const std::vector<double> y = l.multiply(x);
  double acc = 0.0;
  for (double v : y) acc += std::abs(v);
  return acc;
}

double tv_l1(const CsrComplexMatrix& l, const std::vector<Complex>& x) {
  const std::vector<Complex> y = l.multiply(x);
  double acc = 0.0;
  for (const Complex& v : y) acc += std::abs(v);
  return acc;
}

}  // namespace spectra
