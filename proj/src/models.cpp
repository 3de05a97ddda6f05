#include "spectra/models.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "spectra/errors.hpp"

namespace spectra {

const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::sgcn1: return "sgcn1";
    case ModelKind::s2gc: return "s2gc";
    case ModelKind::sgcn2: return "sgcn2";
    case ModelKind::magnet: return "magnet";
  }
  return "?";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "sgcn1") return ModelKind::sgcn1;
  if (name == "s2gc") return ModelKind::s2gc;
  if (name == "sgcn2") return ModelKind::sgcn2;
  if (name == "magnet") return ModelKind::magnet;
  throw DomainError("unknown model '" + name + "' (expected sgcn1, s2gc, sgcn2 or magnet)");
}

void ModelConfig::validate() const {
  if (in_dim == 0 || out_dim == 0 || hidden_dim == 0)
    throw DomainError("model dimensions must be >= 1");
  if (kind != ModelKind::s2gc && n_layers == 0) throw DomainError("n_layers must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw DomainError("dropout must lie in [0, 1)");
  if (kind == ModelKind::magnet && !(q >= 0.0 && q < 0.25))
    throw DomainError("phase parameter q must lie in [0, 0.25)");
}

// ---- contexts --------------------------------------------------------------

PropagationContext PropagationContext::build(const SignedDiGraph& g) {
  return {std::make_shared<const SparseOperand>(renormalized_propagation(g))};
}

AttentionContext AttentionContext::build(const SignedDiGraph& g) {
  PassFilters pf;
  try {
    pf = pass_filters(g);
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " (remove isolated nodes, e.g. --drop-isolated)");
  }
  const CsrMatrix& low = pf.low;
  const std::size_t e_count = low.nnz();
  std::vector<double> full(e_count), off(e_count), self(e_count);
  for (std::size_t i = 0; i < low.n_rows; ++i) {
    for (std::size_t p = low.row_offsets[i]; p < low.row_offsets[i + 1]; ++p) {
      full[p] = low.values[p];
      const bool diag = low.col_indices[p] == i;
      off[p] = diag ? 0.0 : low.values[p];
      self[p] = diag ? 1.0 : 0.0;
    }
  }
  AttentionContext ctx;
  ctx.structure = std::make_shared<const EdgeStructure>(EdgeStructure::from_pattern(low));
  ctx.edge_weights = Tensor::from_data(e_count, 1, std::move(full));
  ctx.w_offdiag = Tensor::from_data(e_count, 1, std::move(off));
  ctx.self_mask = Tensor::from_data(e_count, 1, std::move(self));
  return ctx;
}

ComplexPropagationContext ComplexPropagationContext::build(const SignedDiGraph& g, double q) {
  CsrComplexMatrix p = renormalized_propagation_complex(g, q);
  return {std::make_shared<const SparseOperand>(real_part(p)),
          std::make_shared<const SparseOperand>(imag_part(p))};
}

// ---- parameter initialization ----------------------------------------------

namespace {

std::vector<std::size_t> layer_dims(const ModelConfig& cfg, std::size_t last) {
  std::vector<std::size_t> d;
  d.push_back(cfg.in_dim);
  for (std::size_t l = 1; l < cfg.n_layers; ++l) d.push_back(cfg.hidden_dim);
  d.push_back(last);
  return d;
}

}  // namespace

Sgcn1Params init_sgcn1(const ModelConfig& cfg, Rng& rng) {
  Sgcn1Params p;
  const auto dims = layer_dims(cfg, cfg.out_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    p.weights.push_back(Tensor::glorot(dims[l], dims[l + 1], rng));
  return p;
}

S2gcParams init_s2gc(const ModelConfig& cfg, Rng& rng) {
  return {Tensor::glorot(cfg.in_dim, cfg.out_dim, rng)};
}

Sgcn2Params init_sgcn2(const ModelConfig& cfg, Rng& rng) {
  Sgcn2Params p;
  p.theta_in = Tensor::glorot(cfg.in_dim, cfg.hidden_dim, rng);
  for (std::size_t l = 0; l < cfg.n_layers; ++l)
    p.attention.push_back(Tensor::glorot(2 * cfg.hidden_dim, 1, rng));
  p.theta_out = Tensor::glorot(cfg.hidden_dim, cfg.out_dim, rng);
  return p;
}

MagnetParams init_magnet(const ModelConfig& cfg, Rng& rng) {
  MagnetParams p;
  const auto dims = layer_dims(cfg, cfg.hidden_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    p.w_re.push_back(Tensor::glorot(dims[l], dims[l + 1], rng));
    p.w_im.push_back(Tensor::glorot(dims[l], dims[l + 1], rng));
  }
  p.readout = Tensor::glorot(2 * cfg.hidden_dim, cfg.out_dim, rng);
  return p;
}

EdgeMlpParams init_edge_mlp(std::size_t emb_dim, std::size_t hidden, Rng& rng) {
  EdgeMlpParams p;
  p.w1 = Tensor::glorot(2 * emb_dim, hidden, rng);
  p.b1 = Tensor::zeros(1, hidden, /*requires_grad=*/true);
  p.w2 = Tensor::glorot(hidden, 3, rng);
  p.b2 = Tensor::zeros(1, 3, /*requires_grad=*/true);
  return p;
}

// ---- forward passes --------------------------------------------------------

Tensor sgcn1_forward(const PropagationContext& ctx, const Sgcn1Params& params, const Tensor& x,
                     double dropout_p, bool train, Rng& rng) {
  Tensor h = x;
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    h = dropout(h, dropout_p, train, rng);
    h = spmm(ctx.p, matmul(h, params.weights[l]));
    if (l + 1 < n_layers) h = relu(h);
  }
  return h;
}

Tensor s2gc_forward(const PropagationContext& ctx, const S2gcParams& params, const Tensor& x,
                    std::size_t hops, double dropout_p, bool train, Rng* rng) {
  Tensor h = x;
  if (train && dropout_p > 0.0) {
    if (!rng) throw DomainError("s2gc_forward: training dropout needs an rng");
    h = dropout(h, dropout_p, train, *rng);
  }
  h = matmul(h, params.theta);
  for (std::size_t i = 0; i < hops; ++i) h = spmm(ctx.p, h);
  return h;
}

Tensor sgcn2_attention(const EdgeStructurePtr& structure, const Tensor& h, const Tensor& a) {
  Tensor pair = concat_cols(gather_rows(h, structure->dst), gather_rows(h, structure->src));
  return tanh_act(matmul(pair, a));
}

Tensor sgcn2_forward(const AttentionContext& ctx, const Sgcn2Params& params, const Tensor& x,
                     double dropout_p, bool train, Rng& rng, const Sgcn2Options& opts) {
  Tensor h = dropout(x, dropout_p, train, rng);
  h = relu(matmul(h, params.theta_in));
  for (const Tensor& a : params.attention) {
    Tensor coeff;
    if (opts.force_unit_attention) {
      coeff = ctx.edge_weights;
    } else {
      Tensor beta = sgcn2_attention(ctx.structure, h, a);
      beta = dropout(beta, dropout_p, train, rng);
      // attention scales the off-diagonal weights; the unit self term is fixed
      coeff = add(mul(beta, ctx.w_offdiag), ctx.self_mask);
    }
    h = edge_spmm(ctx.structure, coeff, h);
  }
  return matmul(h, params.theta_out);
}

namespace {

// One dropout mask shared between the real and imaginary parts so the same
// feature channels are dropped in both.
Tensor shared_dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng) {
  std::vector<double> m(rows * cols);
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& v : m) v = rng.uniform() < p ? 0.0 : keep_scale;
  return Tensor::from_data(rows, cols, std::move(m));
}

}  // namespace

Tensor magnet_forward(const ComplexPropagationContext& ctx, const MagnetParams& params,
                      const Tensor& x, double dropout_p, bool train, Rng& rng) {
  Tensor re = x;
  Tensor im = Tensor::zeros(x.rows(), x.cols());
  const std::size_t n_layers = params.w_re.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (train && dropout_p > 0.0) {
      Tensor mask = shared_dropout_mask(re.rows(), re.cols(), dropout_p, rng);
      re = mul(re, mask);
      im = mul(im, mask);
    }
    Tensor pre = sub(spmm(ctx.p_re, re), spmm(ctx.p_im, im));
    Tensor pim = add(spmm(ctx.p_re, im), spmm(ctx.p_im, re));
    Tensor lre = sub(matmul(pre, params.w_re[l]), matmul(pim, params.w_im[l]));
    Tensor lim = add(matmul(pre, params.w_im[l]), matmul(pim, params.w_re[l]));
    re = relu(lre);
    im = relu(lim);
  }
  return matmul(concat_cols(re, im), params.readout);
}

Tensor edge_mlp_forward(const EdgeMlpParams& params, const Tensor& h,
                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::size_t> us, vs;
  us.reserve(pairs.size());
  vs.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    us.push_back(u);
    vs.push_back(v);
  }
  Tensor f = concat_cols(gather_rows(h, us), gather_rows(h, vs));
  Tensor z = relu(add_rowvec(matmul(f, params.w1), params.b1));
  return add_rowvec(matmul(z, params.w2), params.b2);
}

// ---- model wrapper ---------------------------------------------------------

std::vector<NamedParam> Model::parameters() const {
  std::vector<NamedParam> out;
  switch (config.kind) {
    case ModelKind::sgcn1:
      for (std::size_t l = 0; l < sgcn1.weights.size(); ++l)
        out.push_back({"layer" + std::to_string(l) + ".weight", sgcn1.weights[l]});
      break;
    case ModelKind::s2gc:
      out.push_back({"theta", s2gc.theta});
      break;
    case ModelKind::sgcn2:
      out.push_back({"theta_in", sgcn2.theta_in});
      for (std::size_t l = 0; l < sgcn2.attention.size(); ++l)
        out.push_back({"attention" + std::to_string(l), sgcn2.attention[l]});
      out.push_back({"theta_out", sgcn2.theta_out});
      break;
    case ModelKind::magnet:
      for (std::size_t l = 0; l < magnet.w_re.size(); ++l) {
        out.push_back({"layer" + std::to_string(l) + ".w_re", magnet.w_re[l]});
        out.push_back({"layer" + std::to_string(l) + ".w_im", magnet.w_im[l]});
      }
      out.push_back({"readout", magnet.readout});
      break;
  }
  return out;
}

Tensor Model::forward(const Tensor& x, bool train, Rng& rng) const {
  switch (config.kind) {
    case ModelKind::sgcn1:
      return sgcn1_forward(*prop, sgcn1, x, config.dropout, train, rng);
    case ModelKind::s2gc:
      return s2gc_forward(*prop, s2gc, x, config.s2gc_hops, config.dropout, train, &rng);
    case ModelKind::sgcn2:
      return sgcn2_forward(*attn, sgcn2, x, config.dropout, train, rng);
    case ModelKind::magnet:
      return magnet_forward(*cprop, magnet, x, config.dropout, train, rng);
  }
  throw DomainError("unknown model kind");
}

Model build_model(const SignedDiGraph& g, const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Model m;
  m.config = cfg;
  Rng rng(derive_seed(seed, 0xa0de1));
  switch (cfg.kind) {
    case ModelKind::sgcn1:
      m.prop = PropagationContext::build(g);
      m.sgcn1 = init_sgcn1(cfg, rng);
      break;
    case ModelKind::s2gc:
      m.prop = PropagationContext::build(g);
      m.s2gc = init_s2gc(cfg, rng);
      break;
    case ModelKind::sgcn2:
      m.attn = AttentionContext::build(g);
      m.sgcn2 = init_sgcn2(cfg, rng);
      break;
    case ModelKind::magnet:
      m.cprop = ComplexPropagationContext::build(g, cfg.q);
      m.magnet = init_magnet(cfg, rng);
      break;
  }
  return m;
}

// ---- checkpoints -----------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64_block(std::ostream& os, const std::vector<double>& xs) {
  for (double x : xs) put_u64(os, std::bit_cast<std::uint64_t>(x));
}

void get_f64_block(std::istream& is, std::vector<double>& xs) {
  for (double& x : xs) x = std::bit_cast<double>(get_u64(is));
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model, std::uint64_t seed) {
  auto params = model.parameters();
  nlohmann::json header;
  header["model"] = model_name(model.config.kind);
  header["n_layers"] = model.config.n_layers;
  header["hidden_dim"] = model.config.hidden_dim;
  header["in_dim"] = model.config.in_dim;
  header["out_dim"] = model.config.out_dim;
  header["q"] = model.config.q;
  header["dropout"] = model.config.dropout;
  header["s2gc_hops"] = model.config.s2gc_hops;
  header["seed"] = seed;
  nlohmann::json plist = nlohmann::json::array();
  for (const auto& p : params)
    plist.push_back({{"name", p.name}, {"rows", p.tensor.rows()}, {"cols", p.tensor.cols()}});
  header["params"] = plist;
  const std::string htext = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open checkpoint file for writing: " + path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u64(os, htext.size());
  os.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  for (const auto& p : params) put_f64_block(os, p.tensor.values());
  if (!os) throw DomainError("failed writing checkpoint: " + path);
}

Model load_checkpoint(const std::string& path, const SignedDiGraph& g, CheckpointInfo* info) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open checkpoint file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  const std::uint64_t hlen = get_u64(is);
  std::string htext(hlen, '\0');
  is.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw ParseError("truncated checkpoint header: " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(htext);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }

  ModelConfig cfg;
  std::uint64_t seed = 0;
  try {
    cfg.kind = model_from_name(header.at("model").get<std::string>());
    cfg.n_layers = header.at("n_layers").get<std::size_t>();
    cfg.hidden_dim = header.at("hidden_dim").get<std::size_t>();
    cfg.in_dim = header.at("in_dim").get<std::size_t>();
    cfg.out_dim = header.at("out_dim").get<std::size_t>();
    cfg.q = header.at("q").get<double>();
    cfg.dropout = header.at("dropout").get<double>();
    cfg.s2gc_hops = header.at("s2gc_hops").get<std::size_t>();
    seed = header.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }

  Model m = build_model(g, cfg, seed);
  auto params = m.parameters();
  const auto& plist = header.at("params");
  if (plist.size() != params.size())
    throw ParseError("checkpoint parameter count does not match the model");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& meta = plist.at(i);
    if (meta.at("name").get<std::string>() != params[i].name ||
        meta.at("rows").get<std::size_t>() != params[i].tensor.rows() ||
        meta.at("cols").get<std::size_t>() != params[i].tensor.cols())
      throw ParseError("checkpoint parameter '" + params[i].name +
                       "' does not match the model shape");
    get_f64_block(is, params[i].tensor.mutable_values());
  }
  if (!is) throw ParseError("truncated checkpoint data: " + path);
  if (info) *info = {cfg, seed};
  return m;
}

}  // namespace spectra
