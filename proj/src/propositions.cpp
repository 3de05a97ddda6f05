#include "spectra/propositions.hpp"

#include "spectra/eig.hpp"

namespace spectra {

namespace {

template <typename M>
SpectrumBounds bounds_of(const M& m, double lo, double hi, double tol) {
  SpectrumBounds b;
  if (m.n_rows == 0) {
    b.pass = true;  // empty spectrum satisfies any bound vacuously
    return b;
  }
  const Spectrum s = dense_hermitian_eig(m);
  b.min_eigenvalue = s.eigenvalues.front();
  b.max_eigenvalue = s.eigenvalues.back();
  b.pass = b.min_eigenvalue >= lo - tol && b.max_eigenvalue <= hi + tol;
  return b;
}

constexpr double kHuge = 1e300;

}  // namespace

SpectrumBounds psd_bounds(const CsrMatrix& m, double tol) {
  return bounds_of(m, 0.0, kHuge, tol);
}
SpectrumBounds psd_bounds(const CsrComplexMatrix& m, double tol) {
  return bounds_of(m, 0.0, kHuge, tol);
}
SpectrumBounds range_bounds(const CsrMatrix& m, double lo, double hi, double tol) {
  return bounds_of(m, lo, hi, tol);
}
SpectrumBounds range_bounds(const CsrComplexMatrix& m, double lo, double hi, double tol) {
  return bounds_of(m, lo, hi, tol);
}

SpectrumBounds verify_psd(const SignedDiGraph& g, const LaplacianKind& kind, double tol) {
  const SparseHermitian l = build_laplacian(g, kind);
  return std::visit([&](const auto& m) { return psd_bounds(m, tol); }, l);
}

SpectrumBounds verify_eig_range(const SignedDiGraph& g, const LaplacianKind& kind, double tol) {
  const SparseHermitian l = build_laplacian(g, kind);
  return std::visit([&](const auto& m) { return range_bounds(m, 0.0, 2.0, tol); }, l);
}

SignedDiGraph random_signed_digraph(std::size_t n, double density, double neg_fraction,
                                    bool directed, Rng& rng) {
  std::vector<std::tuple<std::size_t, std::size_t, int>> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
      if (j == i) continue;
      if (rng.uniform() >= density) continue;
      const int sign = rng.uniform() < neg_fraction ? -1 : 1;
      arcs.emplace_back(i, j, sign);
    }
  }
  return graph_from_arcs(n, arcs, directed);
}

}  // namespace spectra
