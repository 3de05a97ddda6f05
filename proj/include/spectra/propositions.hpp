#pragma once

#include <cstdint>

#include "spectra/graph.hpp"
#include "spectra/laplacian.hpp"
#include "spectra/rng.hpp"

namespace spectra {

struct SpectrumBounds {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool pass = false;
};

// Checks positive semidefiniteness of the requested Laplacian:
// pass iff min eigenvalue >= -tol.
SpectrumBounds verify_psd(const SignedDiGraph& g, const LaplacianKind& kind, double tol = 1e-8);

// Checks the normalized-spectrum bound: pass iff all eigenvalues lie in
// [-tol, 2 + tol].
SpectrumBounds verify_eig_range(const SignedDiGraph& g, const LaplacianKind& kind,
                                double tol = 1e-8);

// Matrix-level variants, used to probe hand-built (possibly faulty)
// operators directly.
SpectrumBounds psd_bounds(const CsrMatrix& m, double tol = 1e-8);
SpectrumBounds psd_bounds(const CsrComplexMatrix& m, double tol = 1e-8);
SpectrumBounds range_bounds(const CsrMatrix& m, double lo, double hi, double tol = 1e-8);
SpectrumBounds range_bounds(const CsrComplexMatrix& m, double lo, double hi, double tol = 1e-8);

// Random signed digraph for property sweeps: each ordered pair (i,j), i != j,
// receives an arc with the given density; signs are negative with
// neg_fraction probability.  Undirected mode draws unordered pairs instead.
SignedDiGraph random_signed_digraph(std::size_t n, double density, double neg_fraction,
                                    bool directed, Rng& rng);

}  // namespace spectra
