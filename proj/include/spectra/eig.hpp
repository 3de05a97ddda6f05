#pragma once

#include <cstdint>
#include <vector>

#include "spectra/csr.hpp"
#include "spectra/dense.hpp"

namespace spectra {

// Eigendecomposition of a Hermitian matrix.  Eigenvalues ascending; column k
// of the vector matrix pairs with eigenvalues[k].  Exactly one of
// vectors_real / vectors_complex is populated, matching the input flavor.
struct Spectrum {
  std::vector<double> eigenvalues;
  DenseMatrix vectors_real;
  DenseComplexMatrix vectors_complex;
  bool complex_flavor = false;
  double residual_norm = 0.0;  // max_k || M u_k - lambda_k u_k ||_2

  std::size_t size() const { return eigenvalues.size(); }
};

struct EigOptions {
  std::size_t max_dense_dim = 4096;
  double hermitian_tol = 1e-12;  // relative to the largest entry magnitude
};

// Full eigendecomposition via Householder tridiagonalization and
// implicit-shift QL iteration.  Input must be Hermitian within tolerance.
Spectrum dense_hermitian_eig(const DenseMatrix& m, const EigOptions& opts = {});
Spectrum dense_hermitian_eig(const DenseComplexMatrix& m, const EigOptions& opts = {});
Spectrum dense_hermitian_eig(const CsrMatrix& m, const EigOptions& opts = {});
Spectrum dense_hermitian_eig(const CsrComplexMatrix& m, const EigOptions& opts = {});

enum class Which { smallest, largest };

struct LanczosOptions {
  std::size_t max_iter = 0;       // 0 -> 10*k + 200
  double residual_factor = 1e-8;  // accept when residual <= factor * ||M||_F
};

// k extremal eigenpairs of a sparse Hermitian matrix by the Lanczos process
// with full reorthogonalization.  Every returned pair is verified against an
// explicitly computed residual; non-convergence raises ConvergenceError.
Spectrum lanczos_extremal(const CsrMatrix& m, std::size_t k, Which which,
                          const LanczosOptions& opts = {});
Spectrum lanczos_extremal(const CsrComplexMatrix& m, std::size_t k, Which which,
                          const LanczosOptions& opts = {});

// Implicit-shift QL sweep on a symmetric tridiagonal matrix (diagonal d,
// off-diagonal e), accumulating the rotations into the columns of z.
// Exposed for reuse by the randomized SVD and the Lanczos Rayleigh-Ritz step.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseMatrix& z);
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseComplexMatrix& z);

}  // namespace spectra
