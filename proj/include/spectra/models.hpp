#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectra/graph.hpp"
#include "spectra/laplacian.hpp"
#include "spectra/tensor.hpp"

namespace spectra {

enum class ModelKind { sgcn1, s2gc, sgcn2, magnet };

const char* model_name(ModelKind k);
ModelKind model_from_name(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::sgcn1;
  std::size_t n_layers = 2;
  std::size_t hidden_dim = 64;
  std::size_t in_dim = 0;   // feature dimension, set by the caller
  std::size_t out_dim = 1;  // logits (node tasks) or embedding width (link tasks)
  double q = 0.125;         // phase parameter, magnet only
  double dropout = 0.5;
  std::size_t s2gc_hops = 2;

  void validate() const;
};

// ---- propagation contexts (graph-derived constants, built once) -----------

struct PropagationContext {
  SparseOperandPtr p;  // renormalized propagation (real)
  static PropagationContext build(const SignedDiGraph& g);
};

// Pattern of I + Dbar^{-1/2} A Dbar^{-1/2}: every entry is one "edge slot".
// Diagonal slots carry the fixed unit self term; off-diagonal slots carry
// sign/sqrt(dbar_i dbar_j) and get multiplied by learned attention.
struct AttentionContext {
  EdgeStructurePtr structure;
  Tensor edge_weights;  // (E x 1) constant: full matrix values (diag = 1)
  Tensor w_offdiag;     // (E x 1) constant: off-diagonal values, 0 on diagonal
  Tensor self_mask;     // (E x 1) constant: 1 on diagonal slots, 0 elsewhere
  static AttentionContext build(const SignedDiGraph& g);
};

struct ComplexPropagationContext {
  SparseOperandPtr p_re, p_im;  // real/imaginary parts of the complex propagation
  static ComplexPropagationContext build(const SignedDiGraph& g, double q);
};

// ---- parameters ------------------------------------------------------------

struct Sgcn1Params {
  std::vector<Tensor> weights;  // layer l: (dims[l] x dims[l+1])
};
struct S2gcParams {
  Tensor theta;  // (in x out)
};
struct Sgcn2Params {
  Tensor theta_in;                // (in x hidden)
  std::vector<Tensor> attention;  // per layer: (2*hidden x 1)
  Tensor theta_out;               // (hidden x out)
};
struct MagnetParams {
  std::vector<Tensor> w_re, w_im;  // complex layer weights
  Tensor readout;                  // (2*last_dim x out), real
};
struct EdgeMlpParams {
  Tensor w1, b1, w2, b2;  // (2*emb x hidden), (1 x hidden), (hidden x 3), (1 x 3)
};

Sgcn1Params init_sgcn1(const ModelConfig& cfg, Rng& rng);
S2gcParams init_s2gc(const ModelConfig& cfg, Rng& rng);
Sgcn2Params init_sgcn2(const ModelConfig& cfg, Rng& rng);
MagnetParams init_magnet(const ModelConfig& cfg, Rng& rng);
EdgeMlpParams init_edge_mlp(std::size_t emb_dim, std::size_t hidden, Rng& rng);

// ---- forward passes --------------------------------------------------------

// H <- sigma(P H Theta) per layer; the final layer emits plain logits.
// Feature dropout applies to every layer input while training.
Tensor sgcn1_forward(const PropagationContext& ctx, const Sgcn1Params& params, const Tensor& x,
                     double dropout_p, bool train, Rng& rng);

// H = P^hops X Theta; no nonlinearity.  Dropout (training only) applies to X.
Tensor s2gc_forward(const PropagationContext& ctx, const S2gcParams& params, const Tensor& x,
                    std::size_t hops, double dropout_p = 0.0, bool train = false,
                    Rng* rng = nullptr);

// beta_e = tanh(a^T [h_dst(e), h_src(e)]) for every edge slot; values in
// [-1, 1].  Diagonal slots are computed too but never used (their weight
// is the fixed unit self term).
Tensor sgcn2_attention(const EdgeStructurePtr& structure, const Tensor& h, const Tensor& a);

struct Sgcn2Options {
  bool force_unit_attention = false;  // beta == 1: layer becomes (2I - Lbar_n) H
};

// h0 = relu(X Theta1); L attention layers
// h_i += sum_j beta_ij * sign_ij / sqrt(dbar_i dbar_j) * h_j; out = h Theta2.
// Feature dropout on X, attention dropout on beta (training only).
Tensor sgcn2_forward(const AttentionContext& ctx, const Sgcn2Params& params, const Tensor& x,
                     double dropout_p, bool train, Rng& rng, const Sgcn2Options& opts = {});

// Complex propagation P^q H, complex linear transform, ReLU on real and
// imaginary parts separately; after the last layer the parts are
// concatenated and passed through a real linear readout.
Tensor magnet_forward(const ComplexPropagationContext& ctx, const MagnetParams& params,
                      const Tensor& x, double dropout_p, bool train, Rng& rng);

// Pair classifier: concat(h_u, h_v) -> hidden ReLU layer -> 3 logits
// (positive link, negative link, no link).
Tensor edge_mlp_forward(const EdgeMlpParams& params, const Tensor& h,
                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// ---- model wrapper ---------------------------------------------------------

struct Model {
  ModelConfig config;
  std::optional<PropagationContext> prop;
  std::optional<AttentionContext> attn;
  std::optional<ComplexPropagationContext> cprop;
  Sgcn1Params sgcn1;
  S2gcParams s2gc;
  Sgcn2Params sgcn2;
  MagnetParams magnet;

  std::vector<NamedParam> parameters() const;
  Tensor forward(const Tensor& x, bool train, Rng& rng) const;
};

Model build_model(const SignedDiGraph& g, const ModelConfig& cfg, std::uint64_t seed);

// ---- checkpoints -----------------------------------------------------------

// Versioned binary container: magic, version, JSON metadata (model kind,
// dimensions, q, seed), then named parameter blobs as little-endian f64.
void save_checkpoint(const std::string& path, const Model& model, std::uint64_t seed);

struct CheckpointInfo {
  ModelConfig config;
  std::uint64_t seed = 0;
};

// Rebuilds the model (contexts from the graph, parameters from the file).
Model load_checkpoint(const std::string& path, const SignedDiGraph& g,
                      CheckpointInfo* info = nullptr);

}  // namespace spectra
