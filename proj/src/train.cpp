#include "spectra/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "spectra/clustering.hpp"
#include "spectra/errors.hpp"
#include "spectra/format.hpp"
#include "spectra/manifest.hpp"
#include "spectra/splits.hpp"
#include "spectra/svd.hpp"
#include "spectra/tensor.hpp"

namespace spectra {

using nlohmann::json;

const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::nodeclass: return "nodeclass";
    case TaskKind::linksign: return "linksign";
    case TaskKind::cluster: return "cluster";
  }
  return "?";
}

// ---- configuration ---------------------------------------------------------

namespace {

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
  throw DomainError("unknown config key '" + where + key + "'");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw DomainError("config section '" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) bad_key(where, it.key());
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception&) {
    throw DomainError("config key '" + where + key + "' has the wrong type");
  }
}

ModelConfig parse_model(const json& j) {
  check_keys(j, "model.", {"kind", "n_layers", "hidden_dim", "q", "dropout", "s2gc_hops"});
  ModelConfig m;
  if (j.contains("kind")) {
    std::string name;
    read_field(j, "kind", name, "model.");
    m.kind = model_from_name(name);
  }
  read_field(j, "n_layers", m.n_layers, "model.");
  read_field(j, "hidden_dim", m.hidden_dim, "model.");
  read_field(j, "q", m.q, "model.");
  read_field(j, "dropout", m.dropout, "model.");
  read_field(j, "s2gc_hops", m.s2gc_hops, "model.");
  if (m.kind == ModelKind::magnet && !(m.q >= 0.0 && m.q < 0.25))
    throw DomainError("phase parameter q must lie in [0, 0.25)");
  if (!(m.dropout >= 0.0 && m.dropout < 1.0)) throw DomainError("dropout must lie in [0, 1)");
  return m;
}

DataConfig parse_data(const json& j) {
  check_keys(j, "data.", {"ssbm", "edge_list", "labels", "directed", "drop_isolated"});
  DataConfig d;
  if (j.contains("ssbm")) {
    const json& s = j.at("ssbm");
    check_keys(s, "data.ssbm.",
               {"nodes_per_cluster", "p_intra", "p_inter", "flip_prob", "directed"});
    SsbmParams p;
    read_field(s, "nodes_per_cluster", p.nodes_per_cluster, "data.ssbm.");
    read_field(s, "p_intra", p.p_intra, "data.ssbm.");
    read_field(s, "p_inter", p.p_inter, "data.ssbm.");
    read_field(s, "flip_prob", p.flip_prob, "data.ssbm.");
    read_field(s, "directed", p.directed, "data.ssbm.");
    d.ssbm = p;
  }
  read_field(j, "edge_list", d.edge_list, "data.");
  read_field(j, "labels", d.labels, "data.");
  read_field(j, "directed", d.directed, "data.");
  read_field(j, "drop_isolated", d.drop_isolated, "data.");
  if (d.ssbm && !d.edge_list.empty())
    throw DomainError("config: provide either data.ssbm or data.edge_list, not both");
  if (!d.ssbm && d.edge_list.empty())
    throw DomainError("config: data needs an ssbm block or an edge_list path");
  return d;
}

TaskKind parse_task(const std::string& s) {
  if (s == "nodeclass") return TaskKind::nodeclass;
  if (s == "linksign") return TaskKind::linksign;
  if (s == "cluster") return TaskKind::cluster;
  throw DomainError("unknown task '" + s + "' (expected nodeclass, linksign or cluster)");
}

json apply_one_override(json j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw DomainError("override must look like key=value, got '" + kv + "'");
  const std::string path = kv.substr(0, eq);
  const std::string vtext = kv.substr(eq + 1);
  json value;
  try {
    value = json::parse(vtext);
  } catch (const json::exception&) {
    value = vtext;  // bare strings need no quotes
  }
  json* cur = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty()) throw DomainError("bad override path '" + path + "'");
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      break;
    }
    cur = &(*cur)[part];
    if (!cur->is_object() && !cur->is_null())
      throw DomainError("override path '" + path + "' crosses a non-object value");
    start = dot + 1;
  }
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& kv : overrides) j = apply_one_override(std::move(j), kv);

  check_keys(j, "", {"model", "task", "data", "features", "feature_dim", "lr", "weight_decay",
                     "epochs", "seed", "known_label_ratio", "train_edge_ratio",
                     "neg_sample_factor", "n_repeats", "report", "link_propagation", "cluster_k",
                     "mlp_hidden", "output_dir"});
  ExperimentConfig c;
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("task")) {
    std::string t;
    read_field(j, "task", t, "");
    c.task = parse_task(t);
  }
  if (!j.contains("data")) throw DomainError("config: missing required 'data' section");
  c.data = parse_data(j.at("data"));
  if (j.contains("features")) {
    std::string f;
    read_field(j, "features", f, "");
    if (f == "svd")
      c.features = FeatureKind::svd;
    else if (f == "onehot")
      c.features = FeatureKind::onehot;
    else
      throw DomainError("unknown features kind '" + f + "' (expected svd or onehot)");
  }
  read_field(j, "feature_dim", c.feature_dim, "");
  read_field(j, "lr", c.lr, "");
  read_field(j, "weight_decay", c.weight_decay, "");
  read_field(j, "epochs", c.epochs, "");
  read_field(j, "seed", c.seed, "");
  read_field(j, "known_label_ratio", c.known_label_ratio, "");
  read_field(j, "train_edge_ratio", c.train_edge_ratio, "");
  read_field(j, "neg_sample_factor", c.neg_sample_factor, "");
  read_field(j, "n_repeats", c.n_repeats, "");
  if (j.contains("report")) {
    std::string r;
    read_field(j, "report", r, "");
    if (r == "best-val")
      c.report = ReportMode::best_val;
    else if (r == "best-test")
      c.report = ReportMode::best_test;
    else
      throw DomainError("unknown report mode '" + r + "' (expected best-val or best-test)");
  }
  if (j.contains("link_propagation")) {
    std::string p;
    read_field(j, "link_propagation", p, "");
    if (p == "strict")
      c.link_propagation = LinkPropagation::strict;
    else if (p == "full")
      c.link_propagation = LinkPropagation::full;
    else
      throw DomainError("unknown link_propagation '" + p + "' (expected strict or full)");
  }
  read_field(j, "cluster_k", c.cluster_k, "");
  read_field(j, "mlp_hidden", c.mlp_hidden, "");
  read_field(j, "output_dir", c.output_dir, "");
  return c;
}

std::size_t ExperimentConfig::resolved_feature_dim() const {
  if (feature_dim > 0) return feature_dim;
  return task == TaskKind::linksign ? 30 : 64;
}

std::size_t ExperimentConfig::resolved_repeats() const {
  if (n_repeats > 0) return n_repeats;
  return task == TaskKind::nodeclass ? 20 : 10;
}

std::string ExperimentConfig::to_json() const {
  json j;
  json m;
  m["kind"] = model_name(model.kind);
  m["n_layers"] = model.n_layers;
  m["hidden_dim"] = model.hidden_dim;
  m["q"] = model.q;
  m["dropout"] = model.dropout;
  m["s2gc_hops"] = model.s2gc_hops;
  j["model"] = m;
  j["task"] = task_name(task);
  json d;
  if (data.ssbm) {
    d["ssbm"] = {{"nodes_per_cluster", data.ssbm->nodes_per_cluster},
                 {"p_intra", data.ssbm->p_intra},
                 {"p_inter", data.ssbm->p_inter},
                 {"flip_prob", data.ssbm->flip_prob},
                 {"directed", data.ssbm->directed}};
  } else {
    d["edge_list"] = data.edge_list;
    if (!data.labels.empty()) d["labels"] = data.labels;
    d["directed"] = data.directed;
    d["drop_isolated"] = data.drop_isolated;
  }
  j["data"] = d;
  j["features"] = features == FeatureKind::svd ? "svd" : "onehot";
  j["feature_dim"] = resolved_feature_dim();
  j["lr"] = lr;
  j["weight_decay"] = weight_decay;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["known_label_ratio"] = known_label_ratio;
  j["train_edge_ratio"] = train_edge_ratio;
  j["neg_sample_factor"] = neg_sample_factor;
  j["n_repeats"] = resolved_repeats();
  j["report"] = report == ReportMode::best_val ? "best-val" : "best-test";
  j["link_propagation"] = link_propagation == LinkPropagation::strict ? "strict" : "full";
  j["cluster_k"] = cluster_k;
  j["mlp_hidden"] = mlp_hidden;
  j["output_dir"] = output_dir;
  return j.dump(2);
}

std::vector<std::string> ExperimentConfig::warnings() const {
  std::vector<std::string> w;
  if (lr < 1e-3 || lr > 1e-1)
    w.push_back("lr " + format_double(lr) + " is outside the documented range [1e-3, 1e-1]");
  if (weight_decay < 1e-6 || weight_decay > 1e-3)
    w.push_back("weight_decay " + format_double(weight_decay) +
                " is outside the documented range [1e-6, 1e-3]");
  return w;
}

// ---- data assembly ---------------------------------------------------------

namespace {

struct TaskData {
  SignedDiGraph graph;
  std::vector<int> labels;
};

std::vector<int> read_labels_file(const std::string& path, const SignedDiGraph& g) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open labels file: " + path);
  std::map<long long, int> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    const auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    if (sv.empty()) continue;
    long long node = 0;
    int label = 0;
    std::string tmp(sv);
    for (char& ch : tmp)
      if (ch == ',' || ch == '\t') ch = ' ';
    std::istringstream ls(tmp);
    if (!(ls >> node >> label))
      throw ParseError("labels file " + path + " line " + std::to_string(line_no) +
                       ": expected 'node,label'");
    by_id[node] = label;
  }
  std::vector<int> labels(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    const auto it = by_id.find(g.node_ids[i]);
    if (it == by_id.end())
      throw DomainError("labels file " + path + " has no label for node " +
                        std::to_string(g.node_ids[i]));
    labels[i] = it->second;
  }
  return labels;
}

TaskData load_file_data(const DataConfig& d) {
  TaskData td;
  td.graph = load_edge_list_file(d.edge_list, d.directed).graph;
  if (d.drop_isolated) td.graph = drop_isolated_nodes(td.graph).graph;
  if (!d.labels.empty()) td.labels = read_labels_file(d.labels, td.graph);
  return td;
}

TaskData repeat_data(const ExperimentConfig& cfg, const TaskData* shared, std::uint64_t rseed) {
  if (cfg.data.ssbm) {
    auto r = ssbm_generate(*cfg.data.ssbm, derive_seed(rseed, 0xda7a));
    return {std::move(r.graph), std::move(r.labels)};
  }
  return *shared;
}

Tensor make_features(const SignedDiGraph& g, FeatureKind kind, std::size_t dim,
                     std::uint64_t seed) {
  if (kind == FeatureKind::onehot) return Tensor::from_dense(DenseMatrix::identity(g.n_nodes));
  const CsrMatrix a_s = symmetrize(g);
  return Tensor::from_dense(truncated_svd(a_s, dim, seed).features);
}

std::vector<NamedParam> with_mlp_params(const Model& model, EdgeMlpParams& mlp) {
  auto params = model.parameters();
  params.push_back({"mlp.w1", mlp.w1});
  params.push_back({"mlp.b1", mlp.b1});
  params.push_back({"mlp.w2", mlp.w2});
  params.push_back({"mlp.b2", mlp.b2});
  return params;
}

// ---- node classification ----------------------------------------------------

std::vector<int> binary_labels(const std::vector<int>& raw) {
  std::set<int> distinct(raw.begin(), raw.end());
  if (distinct.size() != 2)
    throw DomainError("node classification expects exactly 2 classes, found " +
                      std::to_string(distinct.size()));
  const int lo = *distinct.begin();
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] == lo ? 0 : 1;
  return out;
}

RepeatResult run_nodeclass_repeat(const ExperimentConfig& cfg, const TaskData& data,
                                  std::uint64_t rseed, Model* keep_model) {
  if (data.labels.empty())
    throw DomainError("node classification needs labels (data.labels or ssbm)");
  const std::vector<int> labels = binary_labels(data.labels);
  const NodeSplit split = split_nodes(labels, cfg.known_label_ratio, derive_seed(rseed, 0x5b17));

  Tensor x = make_features(data.graph, cfg.features, cfg.resolved_feature_dim(),
                           derive_seed(rseed, 0xfea7));
  ModelConfig mc = cfg.model;
  mc.in_dim = x.cols();
  mc.out_dim = 1;
  Model model = build_model(data.graph, mc, derive_seed(rseed, 0x30de1));
  auto params = model.parameters();
  AdamState adam;
  Rng rng(derive_seed(rseed, 0x7124));

  std::vector<double> train_targets;
  train_targets.reserve(split.train.size());
  for (std::size_t i : split.train) train_targets.push_back(labels[i]);

  auto eval_accuracy = [&](const std::vector<std::size_t>& idx, const Tensor& out) {
    std::vector<int> pred, truth;
    pred.reserve(idx.size());
    truth.reserve(idx.size());
    for (std::size_t i : idx) {
      pred.push_back(out.value_at(i, 0) > 0.0 ? 1 : 0);
      truth.push_back(labels[i]);
    }
    return accuracy(pred, truth);
  };

  RepeatResult rr;
  double best_val = -1.0, test_at_best_val = 0.0, best_test = 0.0;
  auto observe = [&](std::size_t epoch, double loss_value) {
    Tensor out = model.forward(x, false, rng);
    const double va = eval_accuracy(split.val, out);
    const double ta = eval_accuracy(split.test, out);
    rr.curve.push_back({epoch, loss_value, va, ta});
    if (va > best_val) {
      best_val = va;
      test_at_best_val = ta;
      rr.best_epoch = epoch;
    }
    best_test = std::max(best_test, ta);
  };

  if (cfg.epochs == 0) {
    Tensor out = model.forward(x, false, rng);
    Tensor loss = bce_with_logits(gather_rows(out, split.train), train_targets);
    observe(0, loss.item());
  }
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Tensor out = model.forward(x, true, rng);
    Tensor loss = bce_with_logits(gather_rows(out, split.train), train_targets);
    const double lv = loss.item();
    if (!std::isfinite(lv))
      throw TrainingDivergence("non-finite loss at epoch " + std::to_string(epoch));
    loss.backward();
    adam_step(params, adam, cfg.lr, cfg.weight_decay);
    zero_gradients(params);
    observe(epoch, lv);
  }
  rr.val_metric = best_val;
  rr.reported_accuracy = cfg.report == ReportMode::best_val ? test_at_best_val : best_test;
  if (keep_model) *keep_model = std::move(model);
  return rr;
}

// ---- link sign prediction ----------------------------------------------------

RepeatResult run_linksign_repeat(const ExperimentConfig& cfg, const TaskData& data,
                                 std::uint64_t rseed, bool grid_validation, Model* keep_model) {
  const SignedDiGraph& g = data.graph;
  EdgeSplit es =
      split_edges(g, cfg.train_edge_ratio, cfg.neg_sample_factor, derive_seed(rseed, 0xe59));

  std::vector<LinkTriplet> fit = std::move(es.train), held_out;
  if (grid_validation) {
    std::vector<LinkTriplet> links, nones;
    for (const auto& t : fit) (t.label == LinkLabel::none ? nones : links).push_back(t);
    const std::size_t n_val = std::max<std::size_t>(1, links.size() / 10);
    held_out.assign(links.end() - static_cast<long>(n_val), links.end());
    links.resize(links.size() - n_val);
    fit = std::move(links);
    fit.insert(fit.end(), nones.begin(), nones.end());
  }

  const SignedDiGraph prop =
      cfg.link_propagation == LinkPropagation::strict ? propagation_graph(g, fit) : g;
  Tensor x = make_features(prop, cfg.features, cfg.resolved_feature_dim(),
                           derive_seed(rseed, 0xfea7));
  ModelConfig mc = cfg.model;
  mc.in_dim = x.cols();
  mc.out_dim = mc.hidden_dim;  // node embeddings for the pair classifier
  Model model = build_model(prop, mc, derive_seed(rseed, 0x30de1));
  Rng mlp_rng(derive_seed(rseed, 0x317b));
  EdgeMlpParams mlp = init_edge_mlp(mc.out_dim, cfg.mlp_hidden, mlp_rng);
  auto params = with_mlp_params(model, mlp);
  AdamState adam;
  Rng rng(derive_seed(rseed, 0x7124));

  std::vector<std::pair<std::size_t, std::size_t>> train_pairs;
  std::vector<int> train_labels;
  for (const auto& t : fit) {
    train_pairs.emplace_back(t.u, t.v);
    train_labels.push_back(static_cast<int>(t.label));
  }

  RepeatResult rr;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Tensor h = model.forward(x, true, rng);
    Tensor logits = edge_mlp_forward(mlp, h, train_pairs);
    Tensor loss = softmax_cross_entropy(logits, train_labels);
    const double lv = loss.item();
    if (!std::isfinite(lv))
      throw TrainingDivergence("non-finite loss at epoch " + std::to_string(epoch));
    loss.backward();
    adam_step(params, adam, cfg.lr, cfg.weight_decay);
    zero_gradients(params);
    rr.curve.push_back({epoch, lv, std::nullopt, std::nullopt});
  }

  Tensor h = model.forward(x, false, rng);
  auto predict = [&](const std::vector<LinkTriplet>& triplets, std::vector<int>& pred,
                     std::vector<int>& truth, std::vector<double>& pos_score) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& t : triplets) pairs.emplace_back(t.u, t.v);
    Tensor logits = edge_mlp_forward(mlp, h, pairs);
    const DenseMatrix probs = softmax_values(logits);
    for (std::size_t i = 0; i < triplets.size(); ++i) {
      int arg = 0;
      for (int c = 1; c < 3; ++c)
        if (probs.at(i, c) > probs.at(i, arg)) arg = c;
      pred.push_back(arg);
      truth.push_back(static_cast<int>(triplets[i].label));
      const double p0 = probs.at(i, 0), p1 = probs.at(i, 1);
      pos_score.push_back(p0 + p1 > 0.0 ? p0 / (p0 + p1) : 0.5);
    }
  };

  std::vector<int> pred, truth;
  std::vector<double> score;
  predict(es.test, pred, truth, score);
  rr.accuracy = accuracy(pred, truth);
  rr.f1 = sign_f1(pred, truth);
  std::vector<int> is_positive;
  for (int t : truth) is_positive.push_back(t == static_cast<int>(LinkLabel::positive) ? 1 : 0);
  rr.auc = roc_auc(score, is_positive);

  bool has_pos = false, has_neg = false;
  for (int t : truth) (t == 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    rr.notes.push_back(std::string("test set has no ") + (has_pos ? "negative" : "positive") +
                       " links; its F1 is 0");

  if (grid_validation && !held_out.empty()) {
    std::vector<int> vpred, vtruth;
    std::vector<double> vscore;
    predict(held_out, vpred, vtruth, vscore);
    rr.val_metric = sign_f1(vpred, vtruth).macro_f1;
  }
  if (keep_model) *keep_model = std::move(model);
  return rr;
}

// ---- clustering ---------------------------------------------------------------

RepeatResult run_cluster_repeat(const ExperimentConfig& cfg, const TaskData& data,
                                std::uint64_t rseed) {
  ClusterResult cr =
      magnetic_cluster(data.graph, cfg.model.q, cfg.cluster_k, derive_seed(rseed, 0xc105));
  RepeatResult rr;
  if (!data.labels.empty()) {
    rr.ari = adjusted_rand_index(cr.labels, data.labels);
    rr.val_metric = rr.ari;
  } else {
    rr.ari = std::numeric_limits<double>::quiet_NaN();
    rr.notes.push_back("no ground-truth labels; ARI not computed");
  }
  return rr;
}

// ---- orchestration -------------------------------------------------------------

RepeatResult run_one_repeat(const ExperimentConfig& cfg, const TaskData* shared,
                            std::size_t repeat_index, const RunOptions& opts,
                            Model* keep_model) {
  const std::uint64_t rseed = derive_seed(cfg.seed, 1000 + repeat_index);
  const TaskData data = repeat_data(cfg, shared, rseed);
  switch (cfg.task) {
    case TaskKind::nodeclass: return run_nodeclass_repeat(cfg, data, rseed, keep_model);
    case TaskKind::linksign:
      return run_linksign_repeat(cfg, data, rseed, opts.grid_validation, keep_model);
    case TaskKind::cluster: return run_cluster_repeat(cfg, data, rseed);
  }
  throw DomainError("unknown task");
}

void write_outputs(const ExperimentResult& r, const TaskData* shared) {
  namespace fs = std::filesystem;
  const ExperimentConfig& cfg = r.config;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  {
    std::ofstream os(dir / "summary.json", std::ios::binary);
    os << summary_json(r);
  }
  {
    std::ofstream os(dir / "epochs.jsonl", std::ios::binary);
    for (std::size_t i = 0; i < r.repeats.size(); ++i) {
      for (const auto& rec : r.repeats[i].curve) {
        json line;
        line["repeat"] = i;
        line["epoch"] = rec.epoch;
        line["loss"] = rec.loss;
        if (rec.val_acc) line["val_acc"] = *rec.val_acc;
        if (rec.test_acc) line["test_acc"] = *rec.test_acc;
        os << line.dump() << "\n";
      }
    }
  }
  {
    std::ofstream os(dir / "repeats.csv", std::ios::binary);
    switch (cfg.task) {
      case TaskKind::nodeclass:
        os << "repeat,best_epoch,val_accuracy,test_accuracy\n";
        for (std::size_t i = 0; i < r.repeats.size(); ++i) {
          const auto& rr = r.repeats[i];
          os << i << "," << rr.best_epoch << "," << format_double(rr.val_metric) << ","
             << format_double(rr.reported_accuracy) << "\n";
        }
        break;
      case TaskKind::linksign:
        os << "repeat,accuracy,f1_positive,f1_negative,macro_f1,micro_f1,auc\n";
        for (std::size_t i = 0; i < r.repeats.size(); ++i) {
          const auto& rr = r.repeats[i];
          os << i << "," << format_double(rr.accuracy) << "," << format_double(rr.f1.f1_positive)
             << "," << format_double(rr.f1.f1_negative) << "," << format_double(rr.f1.macro_f1)
             << "," << format_double(rr.f1.micro_f1) << "," << format_double(rr.auc) << "\n";
        }
        break;
      case TaskKind::cluster:
        os << "repeat,ari\n";
        for (std::size_t i = 0; i < r.repeats.size(); ++i)
          os << i << "," << format_double(r.repeats[i].ari) << "\n";
        break;
    }
  }
  {
    std::vector<ManifestInput> inputs;
    if (!cfg.data.edge_list.empty())
      inputs.push_back({cfg.data.edge_list, fnv1a_file(cfg.data.edge_list)});
    if (!cfg.data.labels.empty())
      inputs.push_back({cfg.data.labels, fnv1a_file(cfg.data.labels)});
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    os << manifest_json(cfg.to_json(), inputs, cfg.seed);
  }
  if (cfg.task != TaskKind::cluster) {
    // Regenerate the best repeat's model deterministically and keep it.
    Model best;
    RunOptions opts;
    run_one_repeat(cfg, shared, r.best_repeat, opts, &best);
    save_checkpoint((dir / "model.ckpt").string(), best,
                    derive_seed(cfg.seed, 1000 + r.best_repeat));
  }
}

}  // namespace

std::size_t worker_cap() {
  if (const char* env = std::getenv("SPECTRA_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";

  std::optional<TaskData> shared;
  if (!cfg.data.ssbm) shared = load_file_data(cfg.data);
  const TaskData* shared_ptr = shared ? &*shared : nullptr;

  const std::size_t n = cfg.resolved_repeats();
  ExperimentResult result;
  result.config = cfg;
  result.repeats.resize(n);

  const std::size_t workers = std::min(worker_cap(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      result.repeats[i] = run_one_repeat(cfg, shared_ptr, i, opts, nullptr);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            result.repeats[i] = run_one_repeat(cfg, shared_ptr, i, opts, nullptr);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  auto metric_of = [&](const RepeatResult& rr) {
    switch (cfg.task) {
      case TaskKind::nodeclass: return rr.reported_accuracy;
      case TaskKind::linksign: return rr.f1.micro_f1;
      case TaskKind::cluster: return std::isnan(rr.ari) ? 0.0 : rr.ari;
    }
    return 0.0;
  };
  for (std::size_t i = 1; i < n; ++i)
    if (metric_of(result.repeats[i]) > metric_of(result.repeats[result.best_repeat]))
      result.best_repeat = i;

  for (std::size_t i = 0; i < n; ++i)
    for (const auto& note : result.repeats[i].notes)
      std::cerr << "warning (repeat " << i << "): " << note << "\n";

  if (!cfg.output_dir.empty()) write_outputs(result, shared_ptr);
  return result;
}

std::string summary_json(const ExperimentResult& r) {
  const ExperimentConfig& cfg = r.config;
  json s;
  s["config"] = json::parse(cfg.to_json());
  s["task"] = task_name(cfg.task);
  s["n_repeats"] = r.repeats.size();

  json metrics;
  auto put_stat = [&](const char* name, const std::vector<double>& vals) {
    if (vals.empty()) return;
    metrics[name] = {{"mean", mean_of(vals)}, {"std", stddev_of(vals)}, {"values", vals}};
  };
  auto collect = [&](auto get) {
    std::vector<double> vals;
    vals.reserve(r.repeats.size());
    for (const auto& rr : r.repeats) vals.push_back(get(rr));
    return vals;
  };

  switch (cfg.task) {
    case TaskKind::nodeclass:
      put_stat("test_accuracy", collect([](const RepeatResult& x) { return x.reported_accuracy; }));
      put_stat("val_accuracy", collect([](const RepeatResult& x) { return x.val_metric; }));
      break;
    case TaskKind::linksign:
      put_stat("accuracy", collect([](const RepeatResult& x) { return x.accuracy; }));
      put_stat("f1_positive", collect([](const RepeatResult& x) { return x.f1.f1_positive; }));
      put_stat("f1_negative", collect([](const RepeatResult& x) { return x.f1.f1_negative; }));
      put_stat("macro_f1", collect([](const RepeatResult& x) { return x.f1.macro_f1; }));
      put_stat("micro_f1", collect([](const RepeatResult& x) { return x.f1.micro_f1; }));
      put_stat("auc", collect([](const RepeatResult& x) { return x.auc; }));
      break;
    case TaskKind::cluster: {
      std::vector<double> vals;
      for (const auto& rr : r.repeats)
        if (!std::isnan(rr.ari)) vals.push_back(rr.ari);
      put_stat("ari", vals);
      break;
    }
  }
  s["metrics"] = metrics;
  return s.dump(2) + "\n";
}

GridChoice hyperparameter_grid(const ExperimentConfig& base, const std::vector<double>& lrs,
                               const std::vector<double>& wds) {
  if (lrs.empty() || wds.empty()) throw DomainError("hyperparameter grid must be non-empty");
  std::vector<double> lr_sorted = lrs, wd_sorted = wds;
  std::sort(lr_sorted.begin(), lr_sorted.end());
  std::sort(wd_sorted.begin(), wd_sorted.end());

  GridChoice best;
  best.val_metric = -1.0;
  RunOptions opts;
  opts.grid_validation = true;
  for (const double lr : lr_sorted) {
    for (const double wd : wd_sorted) {
      ExperimentConfig cfg = base;
      cfg.lr = lr;
      cfg.weight_decay = wd;
      cfg.output_dir.clear();
      const ExperimentResult res = run_experiment(cfg, opts);
      std::vector<double> vals;
      for (const auto& rr : res.repeats) vals.push_back(rr.val_metric);
      const double metric = mean_of(vals);
      if (metric > best.val_metric) best = {lr, wd, metric};
    }
  }
  return best;
}

}  // namespace spectra
