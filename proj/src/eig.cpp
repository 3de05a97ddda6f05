#include "spectra/eig.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>

#include "spectra/errors.hpp"
#include "spectra/rng.hpp"

namespace spectra {

namespace {

using Complex = std::complex<double>;

template <typename S>
double entry_abs(const S& v) {
  return std::abs(v);
}

template <typename S>
S conj_of(const S& v) {
  if constexpr (std::is_same_v<S, Complex>)
    return std::conj(v);
  else
    return v;
}

inline double real_of(double v) { return v; }
inline double real_of(const Complex& v) { return v.real(); }

// Reduces a Hermitian matrix to real symmetric tridiagonal form
// (diagonal d, off-diagonal e) by Householder reflections, accumulating the
// unitary transform into q.  Off-diagonal phases are absorbed into q so that
// e is real and non-negative.
template <typename S>
void hermitian_tridiagonalize(DenseMatrixT<S> a, DenseMatrixT<S>& q, std::vector<double>& d,
                              std::vector<double>& e) {
  const std::size_t n = a.n_rows;
  q = DenseMatrixT<S>::identity(n);
  d.assign(n, 0.0);
  e.assign(n >= 1 ? n - 1 : 0, 0.0);
  if (n == 0) return;

  std::vector<S> sub(n >= 1 ? n - 1 : 0, S{});  // subdiagonal before phase removal
  std::vector<S> v(n), w(n), p(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail2 = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail2 += std::norm(a.at(i, k));
    const S alpha = a.at(k + 1, k);
    if (tail2 == 0.0) {
      sub[k] = alpha;  // column already tridiagonal
      continue;
    }
    const double anorm = std::abs(alpha);
    const double xnorm = std::sqrt(tail2 + anorm * anorm);
    // beta has the opposite phase of alpha so that v = x - beta*e1 never
    // cancels.
    const S beta = anorm == 0.0 ? S{-xnorm} : S{-(alpha / anorm) * xnorm};

    v[k + 1] = alpha - beta;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a.at(i, k);
    double vnorm2 = std::norm(v[k + 1]) + tail2;
    const double tau = 2.0 / vnorm2;

    // p = tau * A22 * v over the trailing block.
    for (std::size_t i = k + 1; i < n; ++i) {
      S acc{};
      for (std::size_t j = k + 1; j < n; ++j) acc += a.at(i, j) * v[j];
      p[i] = tau * acc;
    }
    double vp_re = 0.0;
    for (std::size_t i = k + 1; i < n; ++i)
      vp_re += real_of(conj_of(v[i]) * p[i] + conj_of(p[i]) * v[i]) * 0.5;
    const double kappa = 0.5 * tau * vp_re;
    for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - kappa * v[i];

    // A22 -= v w^H + w v^H  (rank-2 Hermitian update).
    for (std::size_t i = k + 1; i < n; ++i) {
      const S vi = v[i], wi = w[i];
      for (std::size_t j = k + 1; j < n; ++j)
        a.at(i, j) -= vi * conj_of(w[j]) + wi * conj_of(v[j]);
    }
    sub[k] = beta;
    a.at(k + 1, k) = beta;

    // Q <- Q (I - tau v v^H).
    for (std::size_t r = 0; r < n; ++r) {
      S acc{};
      for (std::size_t j = k + 1; j < n; ++j) acc += q.at(r, j) * v[j];
      acc *= tau;
      for (std::size_t j = k + 1; j < n; ++j) q.at(r, j) -= acc * conj_of(v[j]);
    }
  }
  if (n >= 2) sub[n - 2] = a.at(n - 1, n - 2);
  for (std::size_t i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<S, Complex>)
      d[i] = a.at(i, i).real();
    else
      d[i] = a.at(i, i);
  }

  // Strip subdiagonal phases: T_real = P^H T P with P diagonal unitary, and
  // fold P into q.
  S scale{1};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double mag = std::abs(sub[k]);
    e[k] = mag;
    if (mag > 0.0) scale = scale * (sub[k] / mag);
    if (scale != S{1})
      for (std::size_t r = 0; r < n; ++r) q.at(r, k + 1) *= scale;
  }
}

template <typename S>
void tridiagonal_ql_impl(std::vector<double>& d, std::vector<double>& e_in, DenseMatrixT<S>& z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  std::vector<double> e(n, 0.0);
  std::copy(e_in.begin(), e_in.end(), e.begin());

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw ConvergenceError("tridiagonal QL iteration failed to converge", std::abs(e[l]));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t row = 0; row < z.n_rows; ++row) {
            const S zf = z.at(row, i + 1);
            z.at(row, i + 1) = s * z.at(row, i) + c * zf;
            z.at(row, i) = c * z.at(row, i) - s * zf;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::copy(e.begin(), e.begin() + e_in.size(), e_in.begin());
}

template <typename S>
void sort_ascending(std::vector<double>& d, DenseMatrixT<S>& z) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> ds(n);
  DenseMatrixT<S> zs(z.n_rows, z.n_cols);
  for (std::size_t c = 0; c < n; ++c) {
    ds[c] = d[order[c]];
    for (std::size_t r = 0; r < z.n_rows; ++r) zs.at(r, c) = z.at(r, order[c]);
  }
  d = std::move(ds);
  z = std::move(zs);
}

template <typename S>
void check_hermitian(const DenseMatrixT<S>& m, double tol) {
  if (m.n_rows != m.n_cols) throw DomainError("eigendecomposition requires a square matrix");
  double max_abs = 0.0, max_dev = 0.0;
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    for (std::size_t j = i; j < m.n_cols; ++j) {
      max_abs = std::max(max_abs, entry_abs(m.at(i, j)));
      max_dev = std::max(max_dev, entry_abs(S(m.at(i, j) - conj_of(m.at(j, i)))));
    }
  }
  if (max_dev > tol * std::max(1.0, max_abs))
    throw DomainError("matrix is not Hermitian within tolerance");
}

template <typename S>
double max_pair_residual(const DenseMatrixT<S>& m, const std::vector<double>& lambda,
                         const DenseMatrixT<S>& u) {
  double worst = 0.0;
  const std::size_t n = m.n_rows;
  std::vector<S> col(n), mu(n);
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) col[i] = u.at(i, k);
    for (std::size_t i = 0; i < n; ++i) {
      S acc{};
      for (std::size_t j = 0; j < n; ++j) acc += m.at(i, j) * col[j];
      mu[i] = acc;
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += std::norm(S(mu[i] - lambda[k] * col[i]));
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

template <typename S>
Spectrum dense_eig_impl(const DenseMatrixT<S>& m, const EigOptions& opts) {
  if (m.n_rows > opts.max_dense_dim)
    throw DomainError("matrix dimension " + std::to_string(m.n_rows) +
                      " exceeds the dense eigensolver cap of " +
                      std::to_string(opts.max_dense_dim));
  check_hermitian(m, opts.hermitian_tol);

  // Closed form for 2x2 blocks: exact where the arithmetic is exact (for
  // instance the normalized two-node spectrum {0,2}), as iterative QL only
  // converges to within an ulp.
  if (m.n_rows == 2) {
    const double a = std::real(m.at(0, 0)), c = std::real(m.at(1, 1));
    const S b = S((m.at(0, 1) + conj_of(m.at(1, 0))) * 0.5);
    const double babs = entry_abs(b);
    Spectrum s;
    s.complex_flavor = std::is_same_v<S, Complex>;
    DenseMatrixT<S> q(2, 2);
    if (babs == 0.0) {
      const bool swap = a > c;
      s.eigenvalues = {swap ? c : a, swap ? a : c};
      q.at(0, swap ? 1 : 0) = S{1};
      q.at(1, swap ? 0 : 1) = S{1};
    } else {
      const double rt = std::hypot(a - c, 2.0 * babs);
      const double lo = (a + c - rt) * 0.5, hi = (a + c + rt) * 0.5;
      s.eigenvalues = {lo, hi};
      for (int k = 0; k < 2; ++k) {
        const double lambda = k == 0 ? lo : hi;
        S v0 = b, v1 = S{lambda - a};
        const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
        q.at(0, k) = S(v0 * (1.0 / nrm));
        q.at(1, k) = S(v1 * (1.0 / nrm));
      }
    }
    s.residual_norm = max_pair_residual(m, s.eigenvalues, q);
    if constexpr (std::is_same_v<S, Complex>)
      s.vectors_complex = std::move(q);
    else
      s.vectors_real = std::move(q);
    return s;
  }

  // Work on the exactly Hermitian average to quench representation noise.
  DenseMatrixT<S> h(m.n_rows, m.n_cols);
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t j = 0; j < m.n_cols; ++j)
      h.at(i, j) = (m.at(i, j) + conj_of(m.at(j, i))) * 0.5;

  DenseMatrixT<S> q;
  std::vector<double> d, e;
  hermitian_tridiagonalize(std::move(h), q, d, e);
  tridiagonal_ql_impl(d, e, q);
  sort_ascending(d, q);

  Spectrum s;
  s.eigenvalues = std::move(d);
  s.complex_flavor = std::is_same_v<S, Complex>;
  s.residual_norm = max_pair_residual(m, s.eigenvalues, q);
  if constexpr (std::is_same_v<S, Complex>)
    s.vectors_complex = std::move(q);
  else
    s.vectors_real = std::move(q);
  return s;
}

template <typename S>
std::vector<S> random_unit_vector(std::size_t n, Rng& rng) {
  std::vector<S> v(n);
  for (auto& x : v) {
    if constexpr (std::is_same_v<S, Complex>)
      x = Complex(rng.normal(), rng.normal());
    else
      x = rng.normal();
  }
  double norm2 = 0.0;
  for (const auto& x : v) norm2 += std::norm(S(x));
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

template <typename S>
Spectrum lanczos_impl(const CsrMatrixT<S>& m, std::size_t k, Which which,
                      const LanczosOptions& opts) {
  const std::size_t n = m.n_rows;
  if (m.n_rows != m.n_cols) throw DomainError("Lanczos requires a square matrix");
  if (k == 0 || k > n) throw DomainError("requested eigenpair count must lie in [1, n]");

  const double fro = m.frobenius_norm();
  const double accept_tol = opts.residual_factor * std::max(fro, 1e-30);
  const std::size_t max_iter = opts.max_iter ? opts.max_iter : 10 * k + 200;
  const std::size_t basis_cap = std::min(n, max_iter);

  Rng rng(derive_seed(0x1a5c205ull, n));  // fixed seed: deterministic start vector
  std::vector<std::vector<S>> basis;
  basis.push_back(random_unit_vector<S>(n, rng));
  std::vector<double> alphas, betas;

  auto inner = [&](const std::vector<S>& a, const std::vector<S>& b) {
    S acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += conj_of(a[i]) * b[i];
    return acc;
  };
  auto norm_of = [&](const std::vector<S>& a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(S(x));
    return std::sqrt(s);
  };

  // Returns the Ritz decomposition of the current tridiagonal matrix.
  auto ritz_of = [&](std::vector<double>& vals, DenseMatrix& vecs) {
    vals = alphas;
    std::vector<double> e(betas.begin(), betas.end());
    e.resize(alphas.size() >= 1 ? alphas.size() - 1 : 0);
    vecs = DenseMatrix::identity(alphas.size());
    tridiagonal_ql_impl(vals, e, vecs);
    sort_ascending(vals, vecs);
  };
  auto selected_indices = [&](std::size_t total) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = which == Which::smallest ? i : total - k + i;
    return idx;
  };

  std::vector<S> w(n);
  while (true) {
    const std::vector<S>& v = basis.back();
    m.multiply(v.data(), 1, w.data());
    const double alpha = real_of(inner(v, w));
    for (std::size_t i = 0; i < n; ++i) w[i] -= alpha * v[i];
    // Full reorthogonalization, two passes for numerical safety.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : basis) {
        const S c = inner(u, w);
        if (c != S{})
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * u[i];
      }
    alphas.push_back(alpha);

    if (basis.size() == basis_cap) break;

    double beta = norm_of(w);
    if (beta <= 1e-13 * std::max(fro, 1.0)) {
      // Invariant subspace found; deflate with a fresh direction.
      w = random_unit_vector<S>(n, rng);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : basis) {
          const S c = inner(u, w);
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * u[i];
        }
      const double nw = norm_of(w);
      if (nw <= 1e-10) break;  // whole space spanned
      for (auto& x : w) x *= S{1.0 / nw};
      betas.push_back(0.0);
      basis.push_back(w);
      continue;
    }

    // Cheap convergence estimate from the last row of the Ritz basis.
    if (basis.size() >= k && basis.size() % 8 == 0) {
      std::vector<double> vals;
      DenseMatrix vecs;
      ritz_of(vals, vecs);
      bool done = true;
      for (std::size_t i : selected_indices(vals.size()))
        if (std::abs(beta * vecs.at(vecs.n_rows - 1, i)) > 0.1 * accept_tol) {
          done = false;
          break;
        }
      if (done) break;
    }

    for (auto& x : w) x *= S{1.0 / beta};
    betas.push_back(beta);
    basis.push_back(w);
  }

  std::vector<double> vals;
  DenseMatrix vecs;
  ritz_of(vals, vecs);
  if (vals.size() < k)
    throw ConvergenceError("Lanczos basis collapsed before reaching k pairs", 0.0);
  const auto idx = selected_indices(vals.size());

  DenseMatrixT<S> u(n, k);
  std::vector<double> lambda(k);
  for (std::size_t c = 0; c < k; ++c) {
    lambda[c] = vals[idx[c]];
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double s = vecs.at(j, idx[c]);
      if (s == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) u.at(i, c) += s * basis[j][i];
    }
  }

  // Verify every selected pair against its explicit residual.
  double worst = 0.0;
  std::vector<S> col(n), mu(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) col[i] = u.at(i, c);
    m.multiply(col.data(), 1, mu.data());
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += std::norm(S(mu[i] - lambda[c] * col[i]));
    worst = std::max(worst, std::sqrt(r2));
  }
  if (worst > accept_tol)
    throw ConvergenceError(
        "Lanczos failed to converge: residual " + std::to_string(worst) + " exceeds " +
            std::to_string(accept_tol),
        worst);

  Spectrum s;
  s.eigenvalues = std::move(lambda);
  s.complex_flavor = std::is_same_v<S, Complex>;
  s.residual_norm = worst;
  if constexpr (std::is_same_v<S, Complex>)
    s.vectors_complex = std::move(u);
  else
    s.vectors_real = std::move(u);
  return s;
}

}  // namespace

void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseMatrix& z) {
  tridiagonal_ql_impl(d, e, z);
}
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseComplexMatrix& z) {
  tridiagonal_ql_impl(d, e, z);
}

Spectrum dense_hermitian_eig(const DenseMatrix& m, const EigOptions& opts) {
  return dense_eig_impl(m, opts);
}
Spectrum dense_hermitian_eig(const DenseComplexMatrix& m, const EigOptions& opts) {
  return dense_eig_impl(m, opts);
}
Spectrum dense_hermitian_eig(const CsrMatrix& m, const EigOptions& opts) {
  return dense_eig_impl(m.to_dense(), opts);
}
Spectrum dense_hermitian_eig(const CsrComplexMatrix& m, const EigOptions& opts) {
  return dense_eig_impl(m.to_dense(), opts);
}

Spectrum lanczos_extremal(const CsrMatrix& m, std::size_t k, Which which,
                          const LanczosOptions& opts) {
  return lanczos_impl(m, k, which, opts);
}
Spectrum lanczos_extremal(const CsrComplexMatrix& m, std::size_t k, Which which,
                          const LanczosOptions& opts) {
  return lanczos_impl(m, k, which, opts);
}

}  // namespace spectra
