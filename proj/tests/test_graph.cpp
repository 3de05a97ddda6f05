#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "spectra/errors.hpp"
#include "spectra/graph.hpp"
#include "spectra/propositions.hpp"

using namespace spectra;

TEST_CASE("edge list parsing accepts comma, space, tab, comments, CRLF") {
  std::istringstream in(
      "# a comment\n"
      "0,1,1\n"
      "1 2 -1\r\n"
      "2\t3\t0.5\n"
      "\n"
      "3,4,-2.5\n");
  LoadReport r = load_edge_list(in, /*directed=*/false);
  CHECK(r.graph.n_nodes == 5);
  CHECK(r.graph.n_links() == 4);
  CHECK(r.graph.n_positive == 2);  // signs of 1 and 0.5
  CHECK(r.graph.n_negative == 2);  // signs of -1 and -2.5
  CHECK(r.graph.adjacency.coeff(0, 1) == 1.0);
  CHECK(r.graph.adjacency.coeff(1, 0) == 1.0);  // undirected mirror
  CHECK(r.graph.adjacency.coeff(1, 2) == -1.0);
}

TEST_CASE("node ids map by first appearance and round-trip through serialize") {
  std::istringstream in("7,3,1\n3,9,-1\n9,7,1\n");
  LoadReport r = load_edge_list(in, true);
  CHECK(r.graph.n_nodes == 3);
  CHECK(r.graph.node_ids == std::vector<std::int64_t>{7, 3, 9});

  const std::string text = serialize(r.graph);
  std::istringstream again(text);
  LoadReport r2 = load_edge_list(again, true);
  CHECK(serialize(r2.graph) == text);
  CHECK(r2.graph.n_nodes == r.graph.n_nodes);
  CHECK(r2.graph.n_positive == r.graph.n_positive);
  CHECK(r2.graph.n_negative == r.graph.n_negative);
}

TEST_CASE("duplicate edges: last wins and is counted") {
  std::istringstream in("0,1,1\n0,1,-1\n");
  LoadReport r = load_edge_list(in, true);
  CHECK(r.duplicate_edges == 1);
  CHECK(r.graph.n_links() == 1);
  CHECK(r.graph.adjacency.coeff(0, 1) == -1.0);
  CHECK(r.graph.n_negative == 1);
}

TEST_CASE("self loops are dropped and counted; the node still exists") {
  std::istringstream in("0,0,1\n0,1,1\n2,2,-1\n");
  LoadReport r = load_edge_list(in, true);
  CHECK(r.self_loops == 2);
  CHECK(r.graph.n_nodes == 3);
  CHECK(r.graph.n_links() == 1);
  CHECK(isolated_nodes(r.graph) == std::vector<std::size_t>{2});
}

TEST_CASE("parse errors carry the line number") {
  {
    std::istringstream in("0,1\n");
    CHECK_THROWS_AS(load_edge_list(in, true), ParseError);
  }
  {
    std::istringstream in("0,1,1\nx,2,1\n");
    try {
      load_edge_list(in, true);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  {
    std::istringstream in("0,1,0\n");  // zero sign is meaningless
    CHECK_THROWS_AS(load_edge_list(in, true), ParseError);
  }
  {
    std::istringstream in("0,1,nan\n");
    CHECK_THROWS_AS(load_edge_list(in, true), ParseError);
  }
}

TEST_CASE("degrees: directed edge gives absolute-symmetric half degrees") {
  // one positive arc 0 -> 1
  SignedDiGraph g = graph_from_arcs(2, {{0, 1, 1}}, true);
  auto d_signed = degrees(g, DegreeMode::signed_sum);
  CHECK(d_signed[0] == 1.0);
  CHECK(d_signed[1] == 0.0);

  CsrMatrix as = symmetrize(g);
  auto d_abs = row_sums(as, DegreeMode::absolute);
  CHECK(d_abs[0] == doctest::Approx(0.5));
  CHECK(d_abs[1] == doctest::Approx(0.5));
}

TEST_CASE("degrees: absolute dominates signed magnitude") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    SignedDiGraph g = random_signed_digraph(12, 0.3, 0.5, /*directed=*/true, rng);
    auto da = degrees(g, DegreeMode::absolute);
    auto ds = degrees(g, DegreeMode::signed_sum);
    for (std::size_t i = 0; i < g.n_nodes; ++i) CHECK(da[i] >= std::abs(ds[i]) - 1e-15);
  }
}

TEST_CASE("symmetrize equals its own transpose bit for bit") {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    SignedDiGraph g = random_signed_digraph(15, 0.25, 0.4, /*directed=*/true, rng);
    CsrMatrix as = symmetrize(g);
    CsrMatrix att = as.transpose();
    REQUIRE(as.same_pattern(att));
    for (std::size_t p = 0; p < as.nnz(); ++p) CHECK(as.values[p] == att.values[p]);
  }
}

TEST_CASE("drop_isolated_nodes relabels compactly and preserves edges") {
  std::istringstream in("0,1,1\n3,3,1\n4,5,-1\n");
  LoadReport r = load_edge_list(in, false);
  REQUIRE(r.graph.n_nodes == 5);  // ids 0,1,3,4,5
  auto dropped = drop_isolated_nodes(r.graph);
  CHECK(dropped.n_dropped == 1);
  CHECK(dropped.graph.n_nodes == 4);
  CHECK(dropped.graph.n_links() == 2);
  CHECK(dropped.graph.node_ids == std::vector<std::int64_t>{0, 1, 4, 5});
  CHECK(isolated_nodes(dropped.graph).empty());
}

TEST_CASE("ssbm: flip 0 gives + intra and - inter edges everywhere") {
  SsbmParams p;
  p.nodes_per_cluster = 30;
  p.p_intra = 0.2;
  p.p_inter = 0.2;
  auto r = ssbm_generate(p, 17);
  const auto& m = r.graph.adjacency;
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t pos = m.row_offsets[i]; pos < m.row_offsets[i + 1]; ++pos) {
      const std::size_t j = m.col_indices[pos];
      const bool same = r.labels[i] == r.labels[j];
      CHECK(m.values[pos] == (same ? 1.0 : -1.0));
    }
}

TEST_CASE("ssbm: deterministic per seed, different across seeds") {
  SsbmParams p;
  p.nodes_per_cluster = 25;
  p.p_intra = 0.1;
  p.p_inter = 0.05;
  p.flip_prob = 0.3;
  auto a = ssbm_generate(p, 9);
  auto b = ssbm_generate(p, 9);
  auto c = ssbm_generate(p, 10);
  CHECK(serialize(a.graph) == serialize(b.graph));
  CHECK(serialize(a.graph) != serialize(c.graph));
}

TEST_CASE("ssbm: positive-edge fraction matches the binomial expectation") {
  // 500 per cluster, p_intra .02, p_inter .01: expected share of positive
  // (intra) links = .02*2*C(500,2) / (.02*2*C(500,2) + .01*500*500)
  // = 4990/7490 ~= 0.6662.
  SsbmParams p;
  p.nodes_per_cluster = 500;
  p.p_intra = 0.02;
  p.p_inter = 0.01;
  double acc = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto r = ssbm_generate(p, 100 + s);
    acc += static_cast<double>(r.graph.n_positive) / r.graph.n_links();
  }
  CHECK(acc / 20 == doctest::Approx(4990.0 / 7490.0).epsilon(0.03));
}

TEST_CASE("ssbm: directed mode samples every ordered pair") {
  SsbmParams p;
  p.nodes_per_cluster = 100;
  p.p_intra = 0.05;
  p.p_inter = 0.05;
  double links = 0.0;
  bool saw_reciprocal = false;
  for (std::uint64_t s = 0; s < 5; ++s) {
    p.directed = true;
    auto r = ssbm_generate(p, 40 + s);
    links += static_cast<double>(r.graph.n_links());
    const auto& m = r.graph.adjacency;
    for (std::size_t i = 0; i < m.n_rows && !saw_reciprocal; ++i)
      for (std::size_t pos = m.row_offsets[i]; pos < m.row_offsets[i + 1]; ++pos)
        if (m.coeff(m.col_indices[pos], i) != 0.0) {
          saw_reciprocal = true;
          break;
        }
  }
  // 200 nodes -> 39800 ordered pairs at p=.05: ~1990 arcs per draw.
  CHECK(links / 5 == doctest::Approx(1990.0).epsilon(0.05));
  CHECK(saw_reciprocal);

  p.directed = false;
  auto r = ssbm_generate(p, 40);
  // undirected samples each unordered pair once: ~995 links
  CHECK(static_cast<double>(r.graph.n_links()) == doctest::Approx(995.0).epsilon(0.15));
}

TEST_CASE("ssbm rejects invalid probabilities") {
  SsbmParams p;
  p.nodes_per_cluster = 4;
  p.p_intra = 1.5;
  CHECK_THROWS_AS(ssbm_generate(p, 1), DomainError);
  p.p_intra = 0.5;
  p.flip_prob = -0.1;
  CHECK_THROWS_AS(ssbm_generate(p, 1), DomainError);
  p.flip_prob = 0.0;
  p.nodes_per_cluster = 0;
  CHECK_THROWS_AS(ssbm_generate(p, 1), DomainError);
}

TEST_CASE("graph_from_arcs mirrors undirected arcs and keeps directed ones") {
  SignedDiGraph d = graph_from_arcs(3, {{0, 1, 1}, {1, 2, -1}}, true);
  CHECK(d.adjacency.coeff(1, 0) == 0.0);
  CHECK(d.n_links() == 2);

  SignedDiGraph u = graph_from_arcs(3, {{0, 1, 1}, {1, 2, -1}}, false);
  CHECK(u.adjacency.coeff(1, 0) == 1.0);
  CHECK(u.adjacency.coeff(2, 1) == -1.0);
  CHECK(u.n_links() == 2);  // links counted once
}
