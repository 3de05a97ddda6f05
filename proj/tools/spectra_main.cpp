#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spectra/clustering.hpp"
#include "spectra/eig.hpp"
#include "spectra/errors.hpp"
#include "spectra/format.hpp"
#include "spectra/graph.hpp"
#include "spectra/laplacian.hpp"
#include "spectra/propositions.hpp"
#include "spectra/train.hpp"

namespace {

using namespace spectra;

SignedDiGraph load_graph(const std::string& path, bool directed, bool drop_isolated) {
  SignedDiGraph g = load_edge_list_file(path, directed).graph;
  if (drop_isolated) {
    const auto rep = drop_isolated_nodes(g);
    if (rep.n_dropped > 0)
      std::cerr << "dropped " << rep.n_dropped << " isolated node(s)\n";
    g = rep.graph;
  }
  return g;
}

LaplacianFamily parse_family(const std::string& s) {
  if (s == "combinatorial") return LaplacianFamily::Combinatorial;
  if (s == "signed") return LaplacianFamily::Signed;
  if (s == "magnetic") return LaplacianFamily::Magnetic;
  if (s == "signed-magnetic") return LaplacianFamily::SignedMagnetic;
  throw DomainError("unknown Laplacian kind '" + s +
                    "' (expected combinatorial, signed, magnetic or signed-magnetic)");
}

std::ofstream open_out(const std::string& path) {
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open output file: " + path);
  return os;
}

void write_coordinate_text(std::ostream& os, const SparseHermitian& m) {
  if (std::holds_alternative<CsrMatrix>(m)) {
    const auto& a = std::get<CsrMatrix>(m);
    for (std::size_t i = 0; i < a.n_rows; ++i)
      for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
        os << i << "," << a.col_indices[p] << "," << format_double(a.values[p]) << "\n";
  } else {
    const auto& a = std::get<CsrComplexMatrix>(m);
    for (std::size_t i = 0; i < a.n_rows; ++i)
      for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
        os << i << "," << a.col_indices[p] << "," << format_double(a.values[p].real()) << ","
           << format_double(a.values[p].imag()) << "\n";
  }
}

void write_spectrum(const Spectrum& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(std::filesystem::path(dir) / "eigenvalues.csv", std::ios::binary);
    os << "index,eigenvalue\n";
    for (std::size_t k = 0; k < s.size(); ++k)
      os << k << "," << format_double(s.eigenvalues[k]) << "\n";
  }
  std::ofstream os(std::filesystem::path(dir) / "eigenvectors.csv", std::ios::binary);
  os << "node";
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << ",re_" << k;
    if (s.complex_flavor) os << ",im_" << k;
  }
  os << "\n";
  const std::size_t n = s.complex_flavor ? s.vectors_complex.n_rows : s.vectors_real.n_rows;
  for (std::size_t i = 0; i < n; ++i) {
    os << i;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.complex_flavor) {
        const auto v = s.vectors_complex.at(i, k);
        os << "," << format_double(v.real()) << "," << format_double(v.imag());
      } else {
        os << "," << format_double(s.vectors_real.at(i, k));
      }
    }
    os << "\n";
  }
}

int cmd_laplacian(const std::string& input, bool directed, bool drop_isolated,
                  const std::string& kind_name, bool normalized, double q, bool q_set,
                  const std::string& out) {
  const SignedDiGraph g = load_graph(input, directed, drop_isolated);
  LaplacianKind kind;
  kind.family = parse_family(kind_name);
  kind.normalized = normalized;
  if (q_set) kind.q = q;
  const SparseHermitian m = build_laplacian(g, kind);
  auto os = open_out(out);
  write_coordinate_text(os, m);
  return 0;
}

int cmd_eig(const std::string& input, bool directed, bool drop_isolated,
            const std::string& kind_name, bool normalized, double q, bool q_set, std::size_t k,
            const std::string& which_name, const std::string& out_dir) {
  const SignedDiGraph g = load_graph(input, directed, drop_isolated);
  LaplacianKind kind;
  kind.family = parse_family(kind_name);
  kind.normalized = normalized;
  if (q_set) kind.q = q;
  const SparseHermitian m = build_laplacian(g, kind);

  Spectrum s;
  if (k == 0) {
    s = std::visit([](const auto& a) { return dense_hermitian_eig(a); }, m);
  } else {
    const Which which = which_name == "largest" ? Which::largest : Which::smallest;
    s = std::visit([&](const auto& a) { return lanczos_extremal(a, k, which); }, m);
  }
  write_spectrum(s, out_dir);
  return 0;
}

int cmd_ssbm(std::size_t nodes_per_cluster, double p_intra, double p_inter, double flip,
             bool directed, std::uint64_t seed, const std::string& out,
             std::string labels_out) {
  SsbmParams params{nodes_per_cluster, p_intra, p_inter, flip, directed};
  const SsbmResult r = ssbm_generate(params, seed);
  {
    auto os = open_out(out);
    os << serialize(r.graph);
  }
  if (labels_out.empty()) labels_out = out + ".labels.csv";
  auto os = open_out(labels_out);
  os << "node,label\n";
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    os << r.graph.node_ids[i] << "," << r.labels[i] << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides) {
  std::ifstream is(config_path);
  if (!is) throw ParseError("cannot open config file: " + config_path);
  std::stringstream buf;
  buf << is.rdbuf();
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(buf.str(), overrides);
  const ExperimentResult result = run_experiment(cfg);
  std::cout << summary_json(result);
  return 0;
}

int cmd_cluster(const std::string& input, bool directed, bool drop_isolated, double q,
                std::size_t k, std::uint64_t seed, const std::string& out,
                std::string embedding_out, const std::string& labels_path) {
  const SignedDiGraph g = load_graph(input, directed, drop_isolated);
  const ClusterResult r = magnetic_cluster(g, q, k, seed);
  {
    auto os = open_out(out);
    os << "node,label\n";
    for (std::size_t i = 0; i < r.labels.size(); ++i)
      os << g.node_ids[i] << "," << r.labels[i] << "\n";
  }
  if (embedding_out.empty()) embedding_out = out + ".embedding.csv";
  {
    auto os = open_out(embedding_out);
    os << "node,re,im\n";
    for (std::size_t i = 0; i < g.n_nodes; ++i)
      os << g.node_ids[i] << "," << format_double(r.embedding.at(i, 0)) << ","
         << format_double(r.embedding.at(i, 1)) << "\n";
  }
  nlohmann::json report;
  report["min_eigenvalue"] = r.min_eigenvalue;
  if (!labels_path.empty()) {
    std::ifstream ls(labels_path);
    if (!ls) throw ParseError("cannot open labels file: " + labels_path);
    std::map<long long, int> by_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ls, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#' || line == "node,label") continue;
      for (char& ch : line)
        if (ch == ',' || ch == '\t') ch = ' ';
      std::istringstream fields(line);
      long long node = 0;
      int label = 0;
      if (!(fields >> node >> label))
        throw ParseError("labels file " + labels_path + " line " + std::to_string(line_no) +
                         ": expected 'node,label'");
      by_id[node] = label;
    }
    std::vector<int> truth(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
      const auto it = by_id.find(g.node_ids[i]);
      if (it == by_id.end())
        throw DomainError("labels file has no label for node " + std::to_string(g.node_ids[i]));
      truth[i] = it->second;
    }
    report["ari"] = adjusted_rand_index(r.labels, truth);
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& input, bool directed, bool drop_isolated, std::size_t trials,
               std::uint64_t seed) {
  if (trials == 0) {
    std::cerr << "warning: --trials 0 runs no checks\n";
    return 0;
  }
  const SignedDiGraph g = load_graph(input, directed, drop_isolated);
  const bool signed_input = g.has_negative_edges();
  Rng rng(derive_seed(seed, 0x7e51f));

  bool all_ok = true;
  std::size_t n_checks = 0;
  auto check = [&](const char* label, const SpectrumBounds& b, double lo_expected) {
    ++n_checks;
    if (!b.pass) {
      all_ok = false;
      std::cerr << "violation: " << label << " (min " << format_double(b.min_eigenvalue)
                << ", max " << format_double(b.max_eigenvalue) << ", expected min >= "
                << format_double(lo_expected) << ")\n";
    }
  };

  // Real families need a single pass each; the magnetic families get fresh
  // random q draws every trial.
  {
    LaplacianKind kind{LaplacianFamily::Signed, false, std::nullopt};
    check("signed PSD", verify_psd(g, kind), 0.0);
    kind.normalized = true;
    check("signed normalized PSD", verify_psd(g, kind), 0.0);
    check("signed normalized range [0,2]", verify_eig_range(g, kind), 0.0);
    if (!signed_input) {
      LaplacianKind comb{LaplacianFamily::Combinatorial, false, std::nullopt};
      check("combinatorial PSD", verify_psd(g, comb), 0.0);
    }
  }
  for (std::size_t t = 0; t < trials; ++t) {
    const double q_signed = rng.uniform(0.0, 0.25);
    LaplacianKind kind{LaplacianFamily::SignedMagnetic, false, q_signed};
    check("signed-magnetic PSD", verify_psd(g, kind), 0.0);
    kind.normalized = true;
    check("signed-magnetic normalized PSD", verify_psd(g, kind), 0.0);
    check("signed-magnetic normalized range [0,2]", verify_eig_range(g, kind), 0.0);
    if (!signed_input) {
      const double q_plain = rng.uniform(0.0, 0.5);
      LaplacianKind plain{LaplacianFamily::Magnetic, false, q_plain};
      check("magnetic PSD", verify_psd(g, plain), 0.0);
      plain.normalized = true;
      check("magnetic normalized PSD", verify_psd(g, plain), 0.0);
      check("magnetic normalized range [0,2]", verify_eig_range(g, plain), 0.0);
    }
  }
  std::cout << (all_ok ? "ok" : "FAILED") << " (" << n_checks << " checks)\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral signal processing on signed directed graphs"};
  app.require_subcommand(1);

  // laplacian
  auto* lap = app.add_subcommand("laplacian", "build a Laplacian and write it as i,j,re[,im]");
  std::string lap_input, lap_kind = "signed", lap_out;
  bool lap_directed = false, lap_drop = false, lap_norm = false;
  double lap_q = 0.0;
  lap->add_option("--input", lap_input, "edge list file")->required();
  lap->add_option("--kind", lap_kind,
                  "combinatorial | signed | magnetic | signed-magnetic");
  lap->add_flag("--normalized", lap_norm, "normalize by inverse square-root degrees");
  auto* lap_q_opt = lap->add_option("--q", lap_q, "phase parameter for magnetic kinds");
  lap->add_flag("--directed", lap_directed, "treat the edge list as directed");
  lap->add_flag("--drop-isolated", lap_drop, "remove isolated nodes first");
  lap->add_option("--out", lap_out, "output file")->required();

  // eig
  auto* eig = app.add_subcommand("eig", "eigendecomposition of a Laplacian");
  std::string eig_input, eig_kind = "signed", eig_which = "smallest", eig_out;
  bool eig_directed = false, eig_drop = false, eig_norm = false;
  double eig_q = 0.0;
  std::size_t eig_k = 0;
  eig->add_option("--input", eig_input, "edge list file")->required();
  eig->add_option("--kind", eig_kind, "Laplacian kind");
  eig->add_flag("--normalized", eig_norm, "normalized variant");
  auto* eig_q_opt = eig->add_option("--q", eig_q, "phase parameter for magnetic kinds");
  eig->add_option("--k", eig_k, "number of extremal pairs (0 = full dense solve)");
  eig->add_option("--which", eig_which, "smallest | largest")
      ->check(CLI::IsMember({"smallest", "largest"}));
  eig->add_flag("--directed", eig_directed, "treat the edge list as directed");
  eig->add_flag("--drop-isolated", eig_drop, "remove isolated nodes first");
  eig->add_option("--out", eig_out, "output directory")->required();

  // ssbm
  auto* ssbm = app.add_subcommand("ssbm", "generate a signed stochastic block model graph");
  std::size_t ssbm_n = 0;
  double ssbm_p1 = 0.0, ssbm_p2 = 0.0, ssbm_flip = 0.0;
  bool ssbm_directed = false;
  std::uint64_t ssbm_seed = 1;
  std::string ssbm_out, ssbm_labels_out;
  ssbm->add_option("--nodes-per-cluster", ssbm_n, "nodes in each of the two clusters")
      ->required();
  ssbm->add_option("--p-intra", ssbm_p1, "intra-cluster (positive) edge probability")
      ->required();
  ssbm->add_option("--p-inter", ssbm_p2, "inter-cluster (negative) edge probability")
      ->required();
  ssbm->add_option("--flip", ssbm_flip, "sign flip probability");
  ssbm->add_flag("--directed", ssbm_directed, "assign random orientations");
  ssbm->add_option("--seed", ssbm_seed, "generator seed");
  ssbm->add_option("--out", ssbm_out, "edge list output file")->required();
  ssbm->add_option("--labels-out", ssbm_labels_out,
                   "labels CSV output (default: <out>.labels.csv)");

  // train
  auto* train = app.add_subcommand("train", "run a training experiment from a JSON config");
  std::string train_config;
  std::vector<std::string> train_overrides;
  train->add_option("--config", train_config, "experiment config JSON file")->required();
  train->add_option("--override", train_overrides,
                    "config override key=value (repeatable, dotted keys)");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "spectral clustering via the phase embedding");
  std::string cl_input, cl_out, cl_embed_out, cl_labels;
  bool cl_directed = false, cl_drop = false;
  double cl_q = 0.125;
  std::size_t cl_k = 2;
  std::uint64_t cl_seed = 1;
  cluster->add_option("--input", cl_input, "edge list file")->required();
  cluster->add_option("--q", cl_q, "phase parameter");
  cluster->add_option("--k", cl_k, "number of clusters");
  cluster->add_option("--seed", cl_seed, "k-means seed");
  cluster->add_flag("--directed", cl_directed, "treat the edge list as directed");
  cluster->add_flag("--drop-isolated", cl_drop, "remove isolated nodes first");
  cluster->add_option("--out", cl_out, "labels CSV output file")->required();
  cluster->add_option("--embedding-out", cl_embed_out,
                      "embedding CSV output (default: <out>.embedding.csv)");
  cluster->add_option("--labels", cl_labels, "ground-truth labels CSV for ARI");

  // verify
  auto* verify = app.add_subcommand("verify", "check spectral properties on a graph");
  std::string ver_input;
  bool ver_directed = false, ver_drop = false;
  std::size_t ver_trials = 10;
  std::uint64_t ver_seed = 1;
  verify->add_option("--input", ver_input, "edge list file")->required();
  verify->add_option("--trials", ver_trials, "random q draws per magnetic kind");
  verify->add_option("--seed", ver_seed, "q sampling seed");
  verify->add_flag("--directed", ver_directed, "treat the edge list as directed");
  verify->add_flag("--drop-isolated", ver_drop, "remove isolated nodes first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
  }

  try {
    if (lap->parsed())
      return cmd_laplacian(lap_input, lap_directed, lap_drop, lap_kind, lap_norm, lap_q,
                           lap_q_opt->count() > 0, lap_out);
    if (eig->parsed())
      return cmd_eig(eig_input, eig_directed, eig_drop, eig_kind, eig_norm, eig_q,
                     eig_q_opt->count() > 0, eig_k, eig_which, eig_out);
    if (ssbm->parsed())
      return cmd_ssbm(ssbm_n, ssbm_p1, ssbm_p2, ssbm_flip, ssbm_directed, ssbm_seed, ssbm_out,
                      ssbm_labels_out);
    if (train->parsed()) return cmd_train(train_config, train_overrides);
    if (cluster->parsed())
      return cmd_cluster(cl_input, cl_directed, cl_drop, cl_q, cl_k, cl_seed, cl_out,
                         cl_embed_out, cl_labels);
    if (verify->parsed())
      return cmd_verify(ver_input, ver_directed, ver_drop, ver_trials, ver_seed);
  } catch (const spectra::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const spectra::TrainingDivergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const spectra::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const spectra::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
