#pragma once

#include <optional>
#include <variant>

#include "spectra/csr.hpp"
#include "spectra/graph.hpp"

namespace spectra {

enum class LaplacianFamily {
  Combinatorial,   // D - A, signed degree sums
  Signed,          // Dbar - A, absolute degree sums
  Magnetic,        // D - A_s .* exp(i 2 pi q (A - A^T)), signed degrees of A_s
  SignedMagnetic,  // Dbar - A_s .* exp(i 2 pi q (A - A^T)), absolute degrees of A_s
};

struct LaplacianKind {
  LaplacianFamily family = LaplacianFamily::Signed;
  bool normalized = false;
  std::optional<double> q;  // required by the magnetic families only
};

bool is_magnetic(LaplacianFamily f);
const char* family_name(LaplacianFamily f);

// Real result for the real families, complex Hermitian for the magnetic
// ones.  Entry (i,j) always equals conj((j,i)) bit-for-bit.
using SparseHermitian = std::variant<CsrMatrix, CsrComplexMatrix>;

// Validation notes: q must be present exactly for magnetic families and lie
// in [0, 0.5) (magnetic) or [0, 0.25) (signed magnetic); graphs with negative
// edges tighten the magnetic bound to 0.25 as phase angles double.  For
// normalized kinds, any node whose family degree is nonpositive is reported
// by its original label (absolute degrees vanish only on isolated nodes).
SparseHermitian build_laplacian(const SignedDiGraph& g, const LaplacianKind& kind);

// D - adj (or Dbar - adj) built from an explicit symmetric adjacency matrix;
// shared by the real families and by the q=0 reduction of the magnetic ones.
CsrMatrix laplacian_from_adjacency(const CsrMatrix& adj, DegreeMode mode, bool normalized);

// GCN-style propagation with the renormalization trick:
// P = (Dbar + I)^{-1/2} (A + I) (Dbar + I)^{-1/2}, Dbar from |A| row sums.
CsrMatrix renormalized_propagation(const SignedDiGraph& g);

// Complex variant built on the symmetrized adjacency:
// P^q = (Dbar + I)^{-1/2} (A_s .* Phi^q + I) (Dbar + I)^{-1/2}.
CsrComplexMatrix renormalized_propagation_complex(const SignedDiGraph& g, double q);

struct PassFilters {
  CsrMatrix low;   // I + Dbar^{-1/2} A Dbar^{-1/2} = 2I - Lbar_n
  CsrMatrix high;  // I - Dbar^{-1/2} A Dbar^{-1/2} = Lbar_n
};

// Low/high-pass operator pair for undirected signed graphs; low + high = 2I
// exactly.  Isolated nodes make the normalization undefined.
PassFilters pass_filters(const SignedDiGraph& g);

}  // namespace spectra
