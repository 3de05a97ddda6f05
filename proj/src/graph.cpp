#include "spectra/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "spectra/rng.hpp"

namespace spectra {

namespace {

struct EdgeKey {
  std::size_t a, b;
  bool operator<(const EdgeKey& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t parse_node_id(std::string_view f, std::size_t line_no) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || p != f.data() + f.size() || v < 0)
    throw ParseError("line " + std::to_string(line_no) + ": bad node id '" + std::string(f) + "'");
  return v;
}

double parse_real(std::string_view f, std::size_t line_no) {
  // std::from_chars for doubles is available in gcc 11; fall back to strtod
  // semantics via stringstream would lose error detail.
  double v = 0.0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || p != f.data() + f.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad sign value '" + std::string(f) + "'");
  return v;
}

SignedDiGraph assemble(std::size_t n_nodes, bool directed,
                       const std::map<EdgeKey, int>& links,
                       std::vector<std::int64_t> node_ids) {
  SignedDiGraph g;
  g.n_nodes = n_nodes;
  g.directed = directed;
  g.node_ids = std::move(node_ids);
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(links.size() * (directed ? 1 : 2));
  for (const auto& [k, s] : links) {
    t.emplace_back(k.a, k.b, static_cast<double>(s));
    if (!directed && k.a != k.b) t.emplace_back(k.b, k.a, static_cast<double>(s));
    if (s > 0)
      ++g.n_positive;
    else
      ++g.n_negative;
  }
  g.adjacency = CsrMatrix::from_triplets(n_nodes, n_nodes, std::move(t));
  return g;
}

}  // namespace

LoadReport load_edge_list(std::istream& in, bool directed) {
  LoadReport report;
  std::unordered_map<std::int64_t, std::size_t> index_of;
  std::vector<std::int64_t> node_ids;
  std::map<EdgeKey, int> links;

  auto intern = [&](std::int64_t label) {
    auto [it, inserted] = index_of.try_emplace(label, node_ids.size());
    if (inserted) node_ids.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    std::string_view body(line);
    if (hash != std::string::npos) body = body.substr(0, hash);
    const auto fields = split_fields(body);
    if (fields.empty()) continue;
    if (fields.size() != 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'src dst sign', got " +
                       std::to_string(fields.size()) + " fields");
    const std::int64_t src = parse_node_id(fields[0], line_no);
    const std::int64_t dst = parse_node_id(fields[1], line_no);
    const double raw = parse_real(fields[2], line_no);
    if (raw == 0.0 || std::isnan(raw))
      throw ParseError("line " + std::to_string(line_no) + ": sign value must be nonzero");
    const int sign = raw > 0.0 ? 1 : -1;
    const std::size_t u = intern(src);
    const std::size_t v = intern(dst);
    if (u == v) {
      ++report.self_loops;
      continue;
    }
    EdgeKey key{u, v};
    if (!directed && key.b < key.a) std::swap(key.a, key.b);
    auto [it, inserted] = links.insert_or_assign(key, sign);
    (void)it;
    if (!inserted) ++report.duplicate_edges;
  }
  const std::size_t n_nodes = node_ids.size();
  report.graph = assemble(n_nodes, directed, links, std::move(node_ids));
  return report;
}

LoadReport load_edge_list_file(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list file: " + path);
  return load_edge_list(in, directed);
}

std::string serialize(const SignedDiGraph& g) {
  // Collect links with original labels, then sort by (src,dst).
  std::vector<std::tuple<std::int64_t, std::int64_t, int>> links;
  const CsrMatrix& a = g.adjacency;
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const std::size_t j = a.col_indices[p];
      if (!g.directed && j < i) continue;  // emit each undirected link once
      links.emplace_back(g.node_ids[i], g.node_ids[j], a.values[p] > 0 ? 1 : -1);
    }
  }
  std::sort(links.begin(), links.end());
  std::string out;
  for (const auto& [s, d, sg] : links) {
    out += std::to_string(s);
    out += ',';
    out += std::to_string(d);
    out += ',';
    out += (sg > 0 ? "1" : "-1");
    out += '\n';
  }
  return out;
}

SignedDiGraph graph_from_arcs(
    std::size_t n_nodes, const std::vector<std::tuple<std::size_t, std::size_t, int>>& arcs,
    bool directed) {
  std::map<EdgeKey, int> links;
  for (const auto& [u, v, s] : arcs) {
    if (u >= n_nodes || v >= n_nodes) throw DomainError("arc endpoint out of range");
    if (u == v) throw DomainError("self-loops are not representable");
    if (s != 1 && s != -1) throw DomainError("edge sign must be +-1");
    EdgeKey key{u, v};
    if (!directed && key.b < key.a) std::swap(key.a, key.b);
    links.insert_or_assign(key, s);
  }
  std::vector<std::int64_t> ids(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) ids[i] = static_cast<std::int64_t>(i);
  return assemble(n_nodes, directed, links, std::move(ids));
}

CsrMatrix symmetrize(const SignedDiGraph& g) {
  const CsrMatrix& a = g.adjacency;
  const CsrMatrix at = a.transpose();
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(a.nnz() * 2);
  // 0.5 * (A(i,j) + A(j,i)) evaluated identically for both orientations.
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    std::size_t pa = a.row_offsets[i], ea = a.row_offsets[i + 1];
    std::size_t pt = at.row_offsets[i], et = at.row_offsets[i + 1];
    while (pa < ea || pt < et) {
      std::size_t ja = pa < ea ? a.col_indices[pa] : a.n_cols;
      std::size_t jt = pt < et ? at.col_indices[pt] : a.n_cols;
      if (ja == jt) {
        t.emplace_back(i, ja, 0.5 * (a.values[pa] + at.values[pt]));
        ++pa, ++pt;
      } else if (ja < jt) {
        t.emplace_back(i, ja, 0.5 * a.values[pa]);
        ++pa;
      } else {
        t.emplace_back(i, jt, 0.5 * at.values[pt]);
        ++pt;
      }
    }
  }
  return CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(t));
}

std::vector<double> row_sums(const CsrMatrix& m, DegreeMode mode) {
  std::vector<double> d(m.n_rows, 0.0);
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t p = m.row_offsets[i]; p < m.row_offsets[i + 1]; ++p)
      d[i] += mode == DegreeMode::absolute ? std::abs(m.values[p]) : m.values[p];
  return d;
}

std::vector<double> degrees(const SignedDiGraph& g, DegreeMode mode) {
  return row_sums(g.adjacency, mode);
}

std::vector<std::size_t> isolated_nodes(const SignedDiGraph& g) {
  std::vector<char> touched(g.n_nodes, 0);
  const CsrMatrix& a = g.adjacency;
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    if (a.row_offsets[i + 1] > a.row_offsets[i]) touched[i] = 1;
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      touched[a.col_indices[p]] = 1;
  }
  std::vector<std::size_t> iso;
  for (std::size_t i = 0; i < g.n_nodes; ++i)
    if (!touched[i]) iso.push_back(i);
  return iso;
}

DropIsolatedReport drop_isolated_nodes(const SignedDiGraph& g) {
  const auto iso = isolated_nodes(g);
  DropIsolatedReport report;
  report.n_dropped = iso.size();
  if (iso.empty()) {
    report.graph = g;
    return report;
  }
  std::vector<std::size_t> remap(g.n_nodes, SIZE_MAX);
  std::vector<std::int64_t> kept_ids;
  std::size_t next = 0, iso_pos = 0;
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    if (iso_pos < iso.size() && iso[iso_pos] == i) {
      ++iso_pos;
      continue;
    }
    remap[i] = next++;
    kept_ids.push_back(g.node_ids[i]);
  }
  const CsrMatrix& a = g.adjacency;
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      t.emplace_back(remap[i], remap[a.col_indices[p]], a.values[p]);
  SignedDiGraph out;
  out.n_nodes = next;
  out.directed = g.directed;
  out.node_ids = std::move(kept_ids);
  out.n_positive = g.n_positive;
  out.n_negative = g.n_negative;
  out.adjacency = CsrMatrix::from_triplets(next, next, std::move(t));
  report.graph = std::move(out);
  return report;
}

SsbmResult ssbm_generate(const SsbmParams& params, std::uint64_t seed) {
  if (params.nodes_per_cluster == 0) throw DomainError("nodes_per_cluster must be positive");
  for (double p : {params.p_intra, params.p_inter, params.flip_prob})
    if (p < 0.0 || p > 1.0) throw DomainError("probabilities must lie in [0,1]");

  const std::size_t n = 2 * params.nodes_per_cluster;
  Rng edge_rng(derive_seed(seed, 1));
  Rng flip_rng(derive_seed(seed, 2));

  SsbmResult result;
  result.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    result.labels[i] = i < params.nodes_per_cluster ? 0 : 1;

  // Candidate pairs: every ordered pair for directed graphs, each unordered
  // pair once otherwise.
  std::vector<std::tuple<std::size_t, std::size_t, int>> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = params.directed ? 0 : i + 1; j < n; ++j) {
      if (j == i) continue;
      const bool same = result.labels[i] == result.labels[j];
      const double p = same ? params.p_intra : params.p_inter;
      if (edge_rng.uniform() >= p) continue;
      int sign = same ? 1 : -1;
      if (flip_rng.uniform() < params.flip_prob) sign = -sign;
      arcs.emplace_back(i, j, sign);
    }
  }
  result.graph = graph_from_arcs(n, arcs, params.directed);
  return result;
}

}  // namespace spectra
