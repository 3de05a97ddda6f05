#include "spectra/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "spectra/errors.hpp"

namespace spectra {

using detail::TensorNode;

namespace {

std::shared_ptr<TensorNode> new_node(std::size_t rows, std::size_t cols) {
  auto n = std::make_shared<TensorNode>();
  n->rows = rows;
  n->cols = cols;
  n->value.assign(rows * cols, 0.0);
  return n;
}

bool any_requires_grad(const std::vector<std::shared_ptr<TensorNode>>& parents) {
  for (const auto& p : parents)
    if (p->requires_grad) return true;
  return false;
}

void check_defined(const Tensor& t, const char* what) {
  if (!t.defined()) throw DomainError(std::string("undefined tensor passed to ") + what);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DomainError(std::string(what) + ": shape mismatch");
}

}  // namespace

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  auto n = new_node(rows, cols);
  n->requires_grad = requires_grad;
  n->is_parameter = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::from_data(std::size_t rows, std::size_t cols, std::vector<double> data,
                         bool requires_grad) {
  if (data.size() != rows * cols) throw DomainError("tensor data size mismatch");
  auto n = new_node(rows, cols);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  n->is_parameter = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::from_dense(const DenseMatrix& m, bool requires_grad) {
  return from_data(m.n_rows, m.n_cols, m.data, requires_grad);
}

Tensor Tensor::glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<double> data(rows * cols);
  for (auto& x : data) x = rng.uniform(-bound, bound);
  return from_data(rows, cols, std::move(data), true);
}

double Tensor::item() const {
  if (!node_ || node_->size() != 1) throw DomainError("item() requires a 1x1 tensor");
  return node_->value[0];
}

DenseMatrix Tensor::to_dense() const {
  DenseMatrix m(rows(), cols());
  m.data = node_->value;
  return m;
}

Tensor Tensor::make(std::size_t rows, std::size_t cols,
                    std::vector<std::shared_ptr<TensorNode>> parents,
                    std::function<void(TensorNode&)> backprop) {
  auto n = new_node(rows, cols);
  if (any_requires_grad(parents)) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backprop = std::move(backprop);
  }
  return Tensor(std::move(n));
}

void Tensor::backward() {
  if (!node_ || node_->size() != 1) throw DomainError("backward requires a scalar loss");
  if (node_->backward_done)
    throw DomainError("backward called twice from the same loss without zeroing gradients");

  // Post-order DFS: every node precedes its consumers, so the reversed order
  // has each node's gradient complete before it distributes to parents.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  struct Frame {
    TensorNode* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      TensorNode* p = f.node->parents[f.next_parent++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  for (TensorNode* n : order) {
    if (n->is_parameter) {
      n->ensure_grad();  // parameter gradients accumulate until zeroed
    } else {
      n->grad.assign(n->size(), 0.0);
    }
  }
  node_->grad[0] = 1.0;
  node_->backward_done = true;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop(**it);
}

void Tensor::zero_grad() {
  if (!node_) return;
  node_->grad.assign(node_->size(), 0.0);
  node_->backward_done = false;
}

EdgeStructure EdgeStructure::from_pattern(const CsrMatrix& pattern) {
  if (pattern.n_rows != pattern.n_cols)
    throw DomainError("edge structure requires a square pattern");
  EdgeStructure s;
  s.n_nodes = pattern.n_rows;
  s.n_edges = pattern.nnz();
  s.row_offsets = pattern.row_offsets;
  s.col_indices = pattern.col_indices;
  s.src.resize(s.n_edges);
  s.dst.resize(s.n_edges);
  for (std::size_t i = 0; i < s.n_nodes; ++i)
    for (std::size_t p = s.row_offsets[i]; p < s.row_offsets[i + 1]; ++p) {
      s.dst[p] = i;
      s.src[p] = s.col_indices[p];
    }
  // Transposed pattern with a permutation back to edge indices.
  std::vector<std::size_t> counts(s.n_nodes, 0);
  for (std::size_t c : s.col_indices) ++counts[c];
  s.t_row_offsets.assign(s.n_nodes + 1, 0);
  for (std::size_t j = 0; j < s.n_nodes; ++j)
    s.t_row_offsets[j + 1] = s.t_row_offsets[j] + counts[j];
  s.t_col_indices.resize(s.n_edges);
  s.t_perm.resize(s.n_edges);
  std::vector<std::size_t> cursor(s.t_row_offsets.begin(), s.t_row_offsets.end() - 1);
  for (std::size_t e = 0; e < s.n_edges; ++e) {
    const std::size_t q = cursor[s.src[e]]++;
    s.t_col_indices[q] = s.dst[e];
    s.t_perm[q] = e;
  }
  return s;
}

// ---- ops -------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_defined(a, "matmul");
  check_defined(b, "matmul");
  if (a.cols() != b.rows()) throw DomainError("matmul: inner dimensions disagree");
  const std::size_t m = a.rows(), kk = a.cols(), n = b.cols();
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(m, n, {an, bn}, [an, bn, m, kk, n](TensorNode& self) {
    const double* g = self.grad.data();
    if (an->requires_grad) {
      an->ensure_grad();  // dA[i,k] += sum_j dC[i,j] B[k,j]
      double* da = an->grad.data();
      const double* bv = bn->value.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < kk; ++k) {
          double acc = 0.0;
          const double* grow = g + i * n;
          const double* brow = bv + k * n;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          da[i * kk + k] += acc;
        }
    }
    if (bn->requires_grad) {
      bn->ensure_grad();  // dB[k,j] += sum_i A[i,k] dC[i,j]
      double* db = bn->grad.data();
      const double* av = an->value.data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g + i * n;
        for (std::size_t k = 0; k < kk; ++k) {
          const double aik = av[i * kk + k];
          if (aik == 0.0) continue;
          double* drow = db + k * n;
          for (std::size_t j = 0; j < n; ++j) drow[j] += aik * grow[j];
        }
      }
    }
  });
  // Forward: C = A B with the same cache-friendly loop order.
  {
    const double* av = a.values().data();
    const double* bv = b.values().data();
    double* cv = c.mutable_values().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < kk; ++k) {
        const double aik = av[i * kk + k];
        if (aik == 0.0) continue;
        const double* brow = bv + k * n;
        double* crow = cv + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
      }
  }
  return c;
}

Tensor spmm(const SparseOperandPtr& m, const Tensor& x) {
  check_defined(x, "spmm");
  if (!m) throw DomainError("spmm: null sparse operand");
  if (m->mat.n_cols != x.rows()) throw DomainError("spmm: dimension mismatch");
  const std::size_t w = x.cols();
  auto xn = x.share();
  Tensor y = Tensor::make(m->mat.n_rows, w, {xn}, [m, xn, w](TensorNode& self) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();  // dX += M^T dY
    std::vector<double> tmp(xn->grad.size(), 0.0);
    m->mat_t.multiply(self.grad.data(), w, tmp.data());
    for (std::size_t i = 0; i < tmp.size(); ++i) xn->grad[i] += tmp[i];
  });
  m->mat.multiply(x.values().data(), w, y.mutable_values().data());
  return y;
}

Tensor edge_spmm(const EdgeStructurePtr& s, const Tensor& coeff, const Tensor& h) {
  check_defined(coeff, "edge_spmm");
  check_defined(h, "edge_spmm");
  if (!s) throw DomainError("edge_spmm: null structure");
  if (coeff.rows() != s->n_edges || coeff.cols() != 1)
    throw DomainError("edge_spmm: coefficient tensor must be (n_edges x 1)");
  if (h.rows() != s->n_nodes) throw DomainError("edge_spmm: feature rows mismatch");
  const std::size_t w = h.cols(), n = s->n_nodes;
  auto cn = coeff.share(), hn = h.share();
  Tensor y = Tensor::make(n, w, {cn, hn}, [s, cn, hn, w, n](TensorNode& self) {
    const double* g = self.grad.data();
    const double* hv = hn->value.data();
    if (cn->requires_grad) {
      cn->ensure_grad();  // dcoeff[e] += <dY[dst(e),:], H[src(e),:]>
      for (std::size_t e = 0; e < s->n_edges; ++e) {
        const double* grow = g + s->dst[e] * w;
        const double* hrow = hv + s->src[e] * w;
        double acc = 0.0;
        for (std::size_t j = 0; j < w; ++j) acc += grow[j] * hrow[j];
        cn->grad[e] += acc;
      }
    }
    if (hn->requires_grad) {
      hn->ensure_grad();  // dH += S^T dY over the transposed pattern
      const double* cv = cn->value.data();
      for (std::size_t j = 0; j < n; ++j) {
        double* drow = hn->grad.data() + j * w;
        for (std::size_t p = s->t_row_offsets[j]; p < s->t_row_offsets[j + 1]; ++p) {
          const double v = cv[s->t_perm[p]];
          const double* grow = g + s->t_col_indices[p] * w;
          for (std::size_t c = 0; c < w; ++c) drow[c] += v * grow[c];
        }
      }
    }
  });
  // Forward: row i accumulates coeff[p] * H[col(p),:] in CSR order.
  {
    const double* cv = coeff.values().data();
    const double* hv = h.values().data();
    double* yv = y.mutable_values().data();
    for (std::size_t i = 0; i < n; ++i) {
      double* yrow = yv + i * w;
      for (std::size_t p = s->row_offsets[i]; p < s->row_offsets[i + 1]; ++p) {
        const double v = cv[p];
        const double* hrow = hv + s->col_indices[p] * w;
        for (std::size_t j = 0; j < w; ++j) yrow[j] += v * hrow[j];
      }
    }
  }
  return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_defined(a, "add");
  check_defined(b, "add");
  check_same_shape(a, b, "add");
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an, bn}, [an, bn](TensorNode& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] += self.grad[i];
    }
  });
  for (std::size_t i = 0; i < c.size(); ++i)
    c.mutable_values()[i] = a.values()[i] + b.values()[i];
  return c;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_defined(a, "sub");
  check_defined(b, "sub");
  check_same_shape(a, b, "sub");
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an, bn}, [an, bn](TensorNode& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] -= self.grad[i];
    }
  });
  for (std::size_t i = 0; i < c.size(); ++i)
    c.mutable_values()[i] = a.values()[i] - b.values()[i];
  return c;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_defined(a, "mul");
  check_defined(b, "mul");
  check_same_shape(a, b, "mul");
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an, bn}, [an, bn](TensorNode& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        an->grad[i] += self.grad[i] * bn->value[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        bn->grad[i] += self.grad[i] * an->value[i];
    }
  });
  for (std::size_t i = 0; i < c.size(); ++i)
    c.mutable_values()[i] = a.values()[i] * b.values()[i];
  return c;
}

Tensor scale(const Tensor& a, double k) {
  check_defined(a, "scale");
  auto an = a.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an}, [an, k](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += k * self.grad[i];
  });
  for (std::size_t i = 0; i < c.size(); ++i) c.mutable_values()[i] = k * a.values()[i];
  return c;
}

Tensor relu(const Tensor& a) {
  check_defined(a, "relu");
  auto an = a.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an}, [an](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (an->value[i] > 0.0) an->grad[i] += self.grad[i];
  });
  for (std::size_t i = 0; i < c.size(); ++i)
    c.mutable_values()[i] = a.values()[i] > 0.0 ? a.values()[i] : 0.0;
  return c;
}

Tensor tanh_act(const Tensor& a) {
  check_defined(a, "tanh_act");
  auto an = a.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an}, [an](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double t = std::tanh(an->value[i]);
      an->grad[i] += self.grad[i] * (1.0 - t * t);
    }
  });
  for (std::size_t i = 0; i < c.size(); ++i) c.mutable_values()[i] = std::tanh(a.values()[i]);
  return c;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  check_defined(a, "concat_cols");
  check_defined(b, "concat_cols");
  if (a.rows() != b.rows()) throw DomainError("concat_cols: row counts differ");
  const std::size_t m = a.rows(), ca = a.cols(), cb = b.cols();
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(m, ca + cb, {an, bn}, [an, bn, m, ca, cb](TensorNode& self) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* grow = self.grad.data() + i * (ca + cb);
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t j = 0; j < ca; ++j) an->grad[i * ca + j] += grow[j];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t j = 0; j < cb; ++j) bn->grad[i * cb + j] += grow[ca + j];
      }
    }
  });
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.mutable_values().data() + i * (ca + cb);
    for (std::size_t j = 0; j < ca; ++j) crow[j] = a.values()[i * ca + j];
    for (std::size_t j = 0; j < cb; ++j) crow[ca + j] = b.values()[i * cb + j];
  }
  return c;
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  check_defined(a, "concat_rows");
  check_defined(b, "concat_rows");
  if (a.cols() != b.cols()) throw DomainError("concat_rows: column counts differ");
  const std::size_t n = a.cols(), ra = a.rows(), rb = b.rows();
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(ra + rb, n, {an, bn}, [an, bn, n, ra, rb](TensorNode& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < ra * n; ++i) an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < rb * n; ++i) bn->grad[i] += self.grad[ra * n + i];
    }
  });
  std::copy(a.values().begin(), a.values().end(), c.mutable_values().begin());
  std::copy(b.values().begin(), b.values().end(), c.mutable_values().begin() + ra * n);
  return c;
}

Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& idx) {
  check_defined(a, "gather_rows");
  const std::size_t n = a.cols();
  for (std::size_t r : idx)
    if (r >= a.rows()) throw DomainError("gather_rows: index out of range");
  auto an = a.share();
  auto idx_copy = std::make_shared<std::vector<std::size_t>>(idx);
  Tensor c = Tensor::make(idx.size(), n, {an}, [an, idx_copy, n](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t r = 0; r < idx_copy->size(); ++r) {
      double* drow = an->grad.data() + (*idx_copy)[r] * n;
      const double* grow = self.grad.data() + r * n;
      for (std::size_t j = 0; j < n; ++j) drow[j] += grow[j];
    }
  });
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy(a.values().begin() + idx[r] * n, a.values().begin() + (idx[r] + 1) * n,
              c.mutable_values().begin() + r * n);
  return c;
}

Tensor scatter_add_rows(const Tensor& a, const std::vector<std::size_t>& dst,
                        std::size_t n_rows) {
  check_defined(a, "scatter_add_rows");
  if (dst.size() != a.rows()) throw DomainError("scatter_add_rows: index count mismatch");
  const std::size_t n = a.cols();
  for (std::size_t r : dst)
    if (r >= n_rows) throw DomainError("scatter_add_rows: index out of range");
  auto an = a.share();
  auto dst_copy = std::make_shared<std::vector<std::size_t>>(dst);
  Tensor c = Tensor::make(n_rows, n, {an}, [an, dst_copy, n](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t r = 0; r < dst_copy->size(); ++r) {
      double* drow = an->grad.data() + r * n;
      const double* grow = self.grad.data() + (*dst_copy)[r] * n;
      for (std::size_t j = 0; j < n; ++j) drow[j] += grow[j];
    }
  });
  for (std::size_t r = 0; r < dst.size(); ++r) {
    double* crow = c.mutable_values().data() + dst[r] * n;
    const double* arow = a.values().data() + r * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += arow[j];
  }
  return c;
}

Tensor scale_rows(const Tensor& a, const Tensor& s) {
  check_defined(a, "scale_rows");
  check_defined(s, "scale_rows");
  if (s.rows() != a.rows() || s.cols() != 1)
    throw DomainError("scale_rows: scale tensor must be (rows x 1)");
  const std::size_t m = a.rows(), n = a.cols();
  auto an = a.share(), sn = s.share();
  Tensor c = Tensor::make(m, n, {an, sn}, [an, sn, m, n](TensorNode& self) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* grow = self.grad.data() + i * n;
      if (an->requires_grad) {
        an->ensure_grad();
        double* drow = an->grad.data() + i * n;
        const double sv = sn->value[i];
        for (std::size_t j = 0; j < n; ++j) drow[j] += sv * grow[j];
      }
      if (sn->requires_grad) {
        sn->ensure_grad();
        const double* arow = an->value.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += grow[j] * arow[j];
        sn->grad[i] += acc;
      }
    }
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c.mutable_values()[i * n + j] = a.values()[i * n + j] * s.values()[i];
  return c;
}

Tensor add_rowvec(const Tensor& a, const Tensor& b) {
  check_defined(a, "add_rowvec");
  check_defined(b, "add_rowvec");
  if (b.rows() != 1 || b.cols() != a.cols())
    throw DomainError("add_rowvec: bias must be (1 x cols)");
  const std::size_t m = a.rows(), n = a.cols();
  auto an = a.share(), bn = b.share();
  Tensor c = Tensor::make(m, n, {an, bn}, [an, bn, m, n](TensorNode& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < m * n; ++i) an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) bn->grad[j] += self.grad[i * n + j];
    }
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c.mutable_values()[i * n + j] = a.values()[i * n + j] + b.values()[j];
  return c;
}

Tensor dropout(const Tensor& a, double p, bool train, Rng& rng) {
  check_defined(a, "dropout");
  if (p < 0.0 || p >= 1.0) throw DomainError("dropout probability must lie in [0, 1)");
  if (!train || p == 0.0) return a;
  const double keep = 1.0 - p;
  const double inv_keep = 1.0 / keep;
  auto mask = std::make_shared<std::vector<double>>(a.size());
  for (auto& v : *mask) v = rng.uniform() < keep ? inv_keep : 0.0;
  auto an = a.share();
  Tensor c = Tensor::make(a.rows(), a.cols(), {an}, [an, mask](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      an->grad[i] += self.grad[i] * (*mask)[i];
  });
  for (std::size_t i = 0; i < c.size(); ++i)
    c.mutable_values()[i] = a.values()[i] * (*mask)[i];
  return c;
}

Tensor sum(const Tensor& a) {
  check_defined(a, "sum");
  auto an = a.share();
  Tensor c = Tensor::make(1, 1, {an}, [an](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += self.grad[0];
  });
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  c.mutable_values()[0] = acc;
  return c;
}

Tensor mean(const Tensor& a) {
  check_defined(a, "mean");
  if (a.size() == 0) throw DomainError("mean of an empty tensor");
  const double inv = 1.0 / static_cast<double>(a.size());
  auto an = a.share();
  Tensor c = Tensor::make(1, 1, {an}, [an, inv](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += self.grad[0] * inv;
  });
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  c.mutable_values()[0] = acc * inv;
  return c;
}

Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  check_defined(logits, "softmax_cross_entropy");
  const std::size_t n = logits.rows(), c = logits.cols();
  if (labels.size() != n) throw DomainError("softmax_cross_entropy: label count mismatch");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= c)
      throw DomainError("softmax_cross_entropy: label out of range");
  if (n == 0) throw DomainError("softmax_cross_entropy: empty batch");

  // Stabilized row-wise probabilities, cached for the backward pass.
  auto probs = std::make_shared<std::vector<double>>(n * c);
  auto labels_copy = std::make_shared<std::vector<int>>(labels);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = logits.values().data() + i * c;
    double mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    const double logz = std::log(z) + mx;
    for (std::size_t j = 0; j < c; ++j) (*probs)[i * c + j] = std::exp(row[j] - logz);
    loss += logz - row[labels[i]];
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  auto ln = logits.share();
  Tensor out =
      Tensor::make(1, 1, {ln}, [ln, probs, labels_copy, n, c, inv_n](TensorNode& self) {
        if (!ln->requires_grad) return;
        ln->ensure_grad();
        const double g = self.grad[0] * inv_n;
        for (std::size_t i = 0; i < n; ++i) {
          double* drow = ln->grad.data() + i * c;
          const double* prow = probs->data() + i * c;
          for (std::size_t j = 0; j < c; ++j) drow[j] += g * prow[j];
          drow[(*labels_copy)[i]] -= g;
        }
      });
  out.mutable_values()[0] = loss * inv_n;
  return out;
}

Tensor bce_with_logits(const Tensor& logits, const std::vector<double>& targets) {
  check_defined(logits, "bce_with_logits");
  const std::size_t n = logits.rows();
  if (logits.cols() != 1) throw DomainError("bce_with_logits: logits must be (n x 1)");
  if (targets.size() != n) throw DomainError("bce_with_logits: target count mismatch");
  if (n == 0) throw DomainError("bce_with_logits: empty batch");
  for (double t : targets)
    if (t < 0.0 || t > 1.0) throw DomainError("bce_with_logits: targets must lie in [0, 1]");

  // loss_i = max(z,0) - z*y + log(1 + exp(-|z|))  (stable form)
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = logits.values()[i];
    loss += std::max(z, 0.0) - z * targets[i] + std::log1p(std::exp(-std::abs(z)));
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  auto tgt = std::make_shared<std::vector<double>>(targets);
  auto ln = logits.share();
  Tensor out = Tensor::make(1, 1, {ln}, [ln, tgt, n, inv_n](TensorNode& self) {
    if (!ln->requires_grad) return;
    ln->ensure_grad();
    const double g = self.grad[0] * inv_n;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = ln->value[i];
      const double sig = 1.0 / (1.0 + std::exp(-z));
      ln->grad[i] += g * (sig - (*tgt)[i]);
    }
  });
  out.mutable_values()[0] = loss * inv_n;
  return out;
}

DenseMatrix softmax_values(const Tensor& logits) {
  const std::size_t n = logits.rows(), c = logits.cols();
  DenseMatrix p(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = logits.values().data() + i * c;
    double mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    for (std::size_t j = 0; j < c; ++j) p.at(i, j) = std::exp(row[j] - mx) / z;
  }
  return p;
}

// ---- optimization ----------------------------------------------------------

void adam_step(std::vector<NamedParam>& params, AdamState& state, double lr,
               double weight_decay) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  if (state.slots.size() != params.size()) {
    state.slots.assign(params.size(), {});
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.slots[i].m.assign(params[i].tensor.size(), 0.0);
      state.slots[i].v.assign(params[i].tensor.size(), 0.0);
    }
    state.t = 0;
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto* node = params[i].tensor.node();
    node->ensure_grad();
    auto& slot = state.slots[i];
    for (std::size_t j = 0; j < node->value.size(); ++j) {
      const double g = node->grad[j] + weight_decay * node->value[j];
      if (!std::isfinite(g))
        throw TrainingDivergence("non-finite gradient in parameter '" + params[i].name + "'");
      slot.m[j] = kBeta1 * slot.m[j] + (1.0 - kBeta1) * g;
      slot.v[j] = kBeta2 * slot.v[j] + (1.0 - kBeta2) * g * g;
      const double mhat = slot.m[j] / bc1;
      const double vhat = slot.v[j] / bc2;
      node->value[j] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
  }
}

void zero_gradients(std::vector<NamedParam>& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

GradCheckReport grad_check(const std::function<Tensor()>& forward,
                           std::vector<NamedParam>& params, double eps) {
  Tensor out = forward();
  zero_gradients(params);
  out.backward();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) {
    p.tensor.node()->ensure_grad();
    analytic.push_back(p.tensor.gradient());
  }

  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].tensor.mutable_values();
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double saved = value[j];
      value[j] = saved + eps;
      const double f_plus = forward().item();
      value[j] = saved - eps;
      const double f_minus = forward().item();
      value[j] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double a = analytic[i][j];
      const double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = params[i].name + "[" + std::to_string(j) + "]";
      }
    }
  }
  zero_gradients(params);
  return report;
}

}  // namespace spectra
