#include "spectra/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "spectra/eig.hpp"
#include "spectra/errors.hpp"
#include "spectra/laplacian.hpp"
#include "spectra/rng.hpp"

namespace spectra {

namespace {

double sq_dist(const DenseMatrix& pts, std::size_t row, const std::vector<double>& center) {
  double acc = 0.0;
  for (std::size_t c = 0; c < pts.n_cols; ++c) {
    const double d = pts.at(row, c) - center[c];
    acc += d * d;
  }
  return acc;
}

KmeansResult kmeans_once(const DenseMatrix& pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.n_rows, dim = pts.n_cols;
  std::vector<std::vector<double>> centers(k, std::vector<double>(dim, 0.0));

  // k-means++ seeding: first center uniform, the rest by squared-distance
  // weighted sampling.
  std::vector<double> d2(n, std::numeric_limits<double>::max());
  {
    const std::size_t first = rng.below(n);
    for (std::size_t c = 0; c < dim; ++c) centers[0][c] = pts.at(first, c);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(pts, i, centers[0]);
    for (std::size_t j = 1; j < k; ++j) {
      double total = 0.0;
      for (double v : d2) total += v;
      std::size_t pick = 0;
      if (total > 0.0) {
        double target = rng.uniform() * total, run = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          run += d2[i];
          if (run >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.below(n);  // all points coincide with chosen centers
      }
      for (std::size_t c = 0; c < dim; ++c) centers[j][c] = pts.at(pick, c);
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], sq_dist(pts, i, centers[j]));
    }
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = sq_dist(pts, i, centers[j]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(j);
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<std::size_t> counts(k, 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[labels[i]];
      for (std::size_t c = 0; c < dim; ++c) centers[labels[i]][c] += pts.at(i, c);
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) {
        // Re-seed an empty cluster at the point farthest from its center.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sq_dist(pts, i, centers[labels[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        for (std::size_t c = 0; c < dim; ++c) centers[j][c] = pts.at(far, c);
      } else {
        for (std::size_t c = 0; c < dim; ++c) centers[j][c] /= static_cast<double>(counts[j]);
      }
    }
  }

  KmeansResult r;
  r.labels = std::move(labels);
  r.centers = DenseMatrix(k, dim);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < dim; ++c) r.centers.at(j, c) = centers[j][c];
  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) r.inertia += sq_dist(pts, i, centers[r.labels[i]]);
  return r;
}

}  // namespace

KmeansResult kmeans(const DenseMatrix& points, std::size_t k, std::size_t restarts,
                    std::uint64_t seed) {
  const std::size_t n = points.n_rows;
  if (k == 0) throw DomainError("k must be positive");
  if (k > n) throw DomainError("k exceeds the number of points");
  if (k == 1) {
    KmeansResult r;
    r.labels.assign(n, 0);
    r.centers = DenseMatrix(1, points.n_cols);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < points.n_cols; ++c)
        r.centers.at(0, c) += points.at(i, c) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> ctr(points.n_cols);
      for (std::size_t c = 0; c < points.n_cols; ++c) ctr[c] = r.centers.at(0, c);
      r.inertia += sq_dist(points, i, ctr);
    }
    return r;
  }

  KmeansResult best;
  best.inertia = std::numeric_limits<double>::max();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    Rng rng(derive_seed(seed, r));
    KmeansResult cand = kmeans_once(points, k, rng);
    if (cand.inertia < best.inertia) best = std::move(cand);
  }
  return best;
}

ClusterResult magnetic_cluster(const SignedDiGraph& g, double q, std::size_t k,
                               std::uint64_t seed) {
  if (g.n_nodes == 0) throw DomainError("cannot cluster an empty graph");
  LaplacianKind kind;
  kind.family = LaplacianFamily::SignedMagnetic;
  kind.normalized = false;
  kind.q = q;
  const SparseHermitian l = build_laplacian(g, kind);
  const CsrComplexMatrix& lm = std::get<CsrComplexMatrix>(l);

  Spectrum s;
  if (g.n_nodes <= 2048) {
    s = dense_hermitian_eig(lm);
  } else {
    s = lanczos_extremal(lm, 1, Which::smallest);
  }

  ClusterResult out;
  out.min_eigenvalue = s.eigenvalues.front();
  out.embedding = DenseMatrix(g.n_nodes, 2);
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    out.embedding.at(i, 0) = s.vectors_complex.at(i, 0).real();
    out.embedding.at(i, 1) = s.vectors_complex.at(i, 0).imag();
  }
  out.labels = kmeans(out.embedding, k, 50, seed).labels;
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DomainError("label vectors differ in length");
  const std::size_t n = a.size();
  if (n == 0) return 1.0;

  std::map<std::pair<int, int>, std::size_t> cont;
  std::map<int, std::size_t> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    ++cont[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto choose2 = [](std::size_t m) { return 0.5 * static_cast<double>(m) * (m - 1); };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : cont) sum_ij += choose2(c);
  for (const auto& [key, c] : rows) sum_a += choose2(c);
  for (const auto& [key, c] : cols) sum_b += choose2(c);
  const double total = choose2(n);
  const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both partitions trivial
  return (sum_ij - expected) / denom;
}

}  // namespace spectra
