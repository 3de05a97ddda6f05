#pragma once

#include <complex>
#include <vector>

#include "spectra/csr.hpp"
#include "spectra/eig.hpp"

namespace spectra {

// Scalar response g(lambda) applied to a graph spectrum.
struct FilterResponse {
  enum class Kind {
    low_pass_2_minus_lambda,  // 2 - lambda
    high_pass_lambda,         // lambda
    abs_normalized,           // 1 - |lambda| / max_k |lambda_k|
    polynomial,               // sum_i coeffs[i] * lambda^i
  };
  Kind kind = Kind::low_pass_2_minus_lambda;
  std::vector<double> coeffs;  // polynomial only

  double evaluate(double lambda, double lambda_abs_max) const;
};

// Graph Fourier transform xhat = U^H x and its inverse x = U xhat, where U
// columns are the eigenvectors of a Spectrum.  A full spectrum gives a
// perfect round-trip; a partial one projects onto the computed subspace.
std::vector<double> gft(const Spectrum& s, const std::vector<double>& x);
std::vector<std::complex<double>> gft(const Spectrum& s,
                                      const std::vector<std::complex<double>>& x);
std::vector<double> igft(const Spectrum& s, const std::vector<double>& xhat);
std::vector<std::complex<double>> igft(const Spectrum& s,
                                       const std::vector<std::complex<double>>& xhat);

// U diag(g(lambda)) U^H x.
std::vector<double> spectral_filter_apply(const Spectrum& s, const FilterResponse& g,
                                          const std::vector<double>& x);
std::vector<std::complex<double>> spectral_filter_apply(
    const Spectrum& s, const FilterResponse& g, const std::vector<std::complex<double>>& x);

// Quadratic form x^H L x (real part; the imaginary part vanishes for
// Hermitian L) and the l1 total variation ||L x||_1.
double tv_quadratic(const CsrMatrix& l, const std::vector<double>& x);
double tv_quadratic(const CsrComplexMatrix& l, const std::vector<std::complex<double>>& x);
double tv_l1(const CsrMatrix& l, const std::vector<double>& x);
double tv_l1(const CsrComplexMatrix& l, const std::vector<std::complex<double>>& x);

}  // namespace spectra
