#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spectra/csr.hpp"
#include "spectra/dense.hpp"
#include "spectra/rng.hpp"

namespace spectra {

namespace detail {

struct TensorNode {
  std::size_t rows = 0, cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily during backward
  bool requires_grad = false;
  bool is_parameter = false;
  bool backward_done = false;  // guards double backward from the same root
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;

  std::size_t size() const { return rows * cols; }
  void ensure_grad() {
    if (grad.size() != size()) grad.assign(size(), 0.0);
  }
};

}  // namespace detail

// Dense 2-D tensor participating in a dynamically built reverse-mode tape.
// Copies share the underlying node; the tape is the DAG of nodes reachable
// from a loss scalar, freed when the result tensors go out of scope.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor from_data(std::size_t rows, std::size_t cols, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor from_dense(const DenseMatrix& m, bool requires_grad = false);
  // Glorot-uniform initialized trainable parameter.
  static Tensor glorot(std::size_t rows, std::size_t cols, Rng& rng);

  std::size_t rows() const { return node_ ? node_->rows : 0; }
  std::size_t cols() const { return node_ ? node_->cols : 0; }
  std::size_t size() const { return node_ ? node_->size() : 0; }
  bool defined() const { return node_ != nullptr; }
  bool requires_grad() const { return node_ && node_->requires_grad; }

  const std::vector<double>& values() const { return node_->value; }
  std::vector<double>& mutable_values() { return node_->value; }
  const std::vector<double>& gradient() const { return node_->grad; }
  double value_at(std::size_t i, std::size_t j) const {
    return node_->value[i * node_->cols + j];
  }
  double item() const;

  DenseMatrix to_dense() const;

  // Reverse pass from this scalar.  Parameter gradients accumulate until
  // zeroed; calling backward a second time from the same root without
  // zeroing is an error.
  void backward();
  void zero_grad();

  detail::TensorNode* node() const { return node_.get(); }
  const std::shared_ptr<detail::TensorNode>& share() const { return node_; }

  static Tensor make(std::size_t rows, std::size_t cols,
                     std::vector<std::shared_ptr<detail::TensorNode>> parents,
                     std::function<void(detail::TensorNode&)> backprop);
  explicit Tensor(std::shared_ptr<detail::TensorNode> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<detail::TensorNode> node_;
};

// Sparse matrix packaged with its transpose so the backward pass never
// re-derives it.  Shared by reference into the tape.
struct SparseOperand {
  CsrMatrix mat;
  CsrMatrix mat_t;
  explicit SparseOperand(CsrMatrix m) : mat(std::move(m)), mat_t(mat.transpose()) {}
};
using SparseOperandPtr = std::shared_ptr<const SparseOperand>;

// Fixed sparsity pattern whose values come from a tensor of per-edge
// coefficients; edge e corresponds to pattern position e (row-major CSR
// order).  Supports Y = S(coeff) * H with gradients to both coeff and H.
struct EdgeStructure {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::vector<std::size_t> row_offsets, col_indices;      // forward pattern
  std::vector<std::size_t> t_row_offsets, t_col_indices;  // transposed pattern
  std::vector<std::size_t> t_perm;  // transpose position -> edge index
  std::vector<std::size_t> src, dst;  // per edge: col (source), row (destination)

  static EdgeStructure from_pattern(const CsrMatrix& pattern);
};
using EdgeStructurePtr = std::shared_ptr<const EdgeStructure>;

// ---- operations ----------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor spmm(const SparseOperandPtr& m, const Tensor& x);  // M * X
Tensor edge_spmm(const EdgeStructurePtr& s, const Tensor& coeff, const Tensor& h);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor tanh_act(const Tensor& a);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& idx);
Tensor scatter_add_rows(const Tensor& a, const std::vector<std::size_t>& dst,
                        std::size_t n_rows);
Tensor scale_rows(const Tensor& a, const Tensor& s);  // s: (rows x 1)
Tensor add_rowvec(const Tensor& a, const Tensor& b);  // b: (1 x cols)
// Inverted dropout: keeps entries with probability 1-p and rescales by
// 1/(1-p); identity when train is false.  Mask drawn from rng at call time.
Tensor dropout(const Tensor& a, double p, bool train, Rng& rng);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// Fused, numerically stabilized losses (mean over rows).
Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);
Tensor bce_with_logits(const Tensor& logits, const std::vector<double>& targets);

// Row-wise softmax probabilities of a forward value (no tape).
DenseMatrix softmax_values(const Tensor& logits);

// ---- optimization --------------------------------------------------------

struct NamedParam {
  std::string name;
  Tensor tensor;
};

struct AdamState {
  struct Slot {
    std::vector<double> m, v;
  };
  std::vector<Slot> slots;
  std::size_t t = 0;
};

// Adam with coupled L2 weight decay: g <- g + wd * param before the moment
// updates.  beta1=0.9, beta2=0.999, eps=1e-8.  Throws TrainingDivergence on
// non-finite gradients, naming the parameter.
void adam_step(std::vector<NamedParam>& params, AdamState& state, double lr,
               double weight_decay);
void zero_gradients(std::vector<NamedParam>& params);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
};

// Central-difference gradient check of a scalar-valued forward function.
// Relative error per entry: |a - n| / max(1, |a|, |n|).
GradCheckReport grad_check(const std::function<Tensor()>& forward,
                           std::vector<NamedParam>& params, double eps = 1e-5);

}  // namespace spectra
