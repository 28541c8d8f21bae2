#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aggforge/csr.hpp"
#include "aggforge/reference_kernel.hpp"
#include "test_support.hpp"

using namespace aggforge;

namespace {

// Three-vertex running example: edges (0,2),(1,2),(2,0).
const std::vector<Edge> kG3 = {{0, 2}, {1, 2}, {2, 0}};

}  // namespace

TEST_CASE("build_csr matches the hand-built layout") {
  CsrGraph g = build_csr(kG3, 3);
  CHECK(g.row_ptr() == std::vector<EdgeId>{0, 1, 1, 3});
  CHECK(g.col_idx() == std::vector<VertexId>{2, 0, 1});
  CHECK(g.edge_id() == std::vector<EdgeId>{2, 0, 1});
}

TEST_CASE("build_csr empty graph") {
  CsrGraph g = build_csr({}, 4);
  CHECK(g.row_ptr() == std::vector<EdgeId>{0, 0, 0, 0, 0});
  CHECK(g.col_idx().empty());
}

TEST_CASE("build_csr rejects out-of-range endpoints") {
  CHECK_THROWS_AS(build_csr(std::vector<Edge>{{5, 0}}, 3), std::out_of_range);
  CHECK_THROWS_AS(build_csr(std::vector<Edge>{{0, 3}}, 3), std::out_of_range);
  CHECK_THROWS_AS(build_csr(std::vector<Edge>{{-1, 0}}, 3), std::out_of_range);
}

TEST_CASE("build_csr keeps duplicate edges and input order within rows") {
  std::vector<Edge> edges = {{1, 0}, {1, 0}, {2, 0}};
  CsrGraph g = build_csr(edges, 3);
  CHECK(g.in_degree(0) == 3);
  auto srcs = g.sources(0);
  CHECK(std::vector<VertexId>(srcs.begin(), srcs.end()) == std::vector<VertexId>{1, 1, 2});
}

TEST_CASE("transpose reverses edges and keeps edge ids") {
  CsrGraph g = build_csr(kG3, 3);
  CsrGraph t = transpose(g);
  // Transposed edge list {(2,0),(2,1),(0,2)} grouped by destination.
  CHECK(t.edges() == std::vector<Edge>{{2, 0}, {2, 1}, {0, 2}});

  CHECK(transpose(build_csr({}, 3)).num_edges() == 0);

  CsrGraph loop = build_csr(std::vector<Edge>{{1, 1}}, 2);
  CHECK(transpose(loop).edges() == std::vector<Edge>{{1, 1}});
}

TEST_CASE("transpose twice restores the edge multiset and ids") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    VertexId n = 2 + static_cast<VertexId>(rng.next_below(40));
    auto edges = testing::random_edges(rng, n, 0.15, true);
    CsrGraph g = build_csr(edges, n);
    CsrGraph tt = transpose(transpose(g));
    CHECK(tt.edges() == g.edges());
  }
}

TEST_CASE("csr round-trips the input edge multiset") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    VertexId n = 1 + static_cast<VertexId>(rng.next_below(50));
    auto edges = testing::random_edges(rng, n, 0.2, true);
    CsrGraph g = build_csr(edges, n);
    CHECK(g.edges() == edges);  // edge ids restore input order exactly
  }
}

TEST_CASE("in_degrees") {
  CHECK(in_degrees(build_csr(kG3, 3)) == std::vector<EdgeId>{1, 0, 2});
  CHECK(in_degrees(build_csr({}, 2)) == std::vector<EdgeId>{0, 0});
  // complete digraph K3, no self loops
  std::vector<Edge> k3;
  for (VertexId u = 0; u < 3; ++u)
    for (VertexId v = 0; v < 3; ++v)
      if (u != v) k3.push_back({u, v});
  CHECK(in_degrees(build_csr(k3, 3)) == std::vector<EdgeId>{2, 2, 2});
}

TEST_CASE("apply_elem covers binary and copy forms") {
  CHECK(apply_elem<double>({BinaryOp::mul, ReduceOp::sum}, 2, 3, 4) == 10);
  CHECK(apply_elem<double>({BinaryOp::copy_lhs, ReduceOp::max}, 7, -123, 5) == 7);
  CHECK_THROWS_AS(apply_elem<double>({BinaryOp::div, ReduceOp::sum}, 1, 0, 0),
                  std::domain_error);
  CHECK(apply_elem<std::int64_t>({BinaryOp::sub, ReduceOp::min}, 2, 5, 1) == -3);
  CHECK(apply_elem<double>({BinaryOp::copy_rhs, ReduceOp::sum}, 99, 4, 1) == 5);
}

TEST_CASE("ap_reference on the running example") {
  CsrGraph g = build_csr(kG3, 3);
  FeatureMatrix<double> fv(3, 1, {1, 2, 4});

  SUBCASE("copylhs/sum") {
    auto out = ap_reference<double>(g, fv, nullptr, {BinaryOp::copy_lhs, ReduceOp::sum});
    CHECK(out.data() == std::vector<double>{4, 0, 3});
  }
  SUBCASE("mul/sum with edge features") {
    FeatureMatrix<double> fe(3, 1, {10, 20, 30});
    auto out = ap_reference<double>(g, fv, &fe, {BinaryOp::mul, ReduceOp::sum});
    CHECK(out.data() == std::vector<double>{120, 0, 50});
  }
  SUBCASE("copylhs/max of equal features returns the constant") {
    FeatureMatrix<double> c(3, 1, {5, 5, 5});
    auto out = ap_reference<double>(g, c, nullptr, {BinaryOp::copy_lhs, ReduceOp::max});
    CHECK(out.at(0, 0) == 5);
    CHECK(out.at(2, 0) == 5);
    CHECK(out.at(1, 0) == 0);  // no in-edges -> zero row
  }
}

TEST_CASE("ap_reference requires edge features only for binary operands") {
  CsrGraph g = build_csr(kG3, 3);
  FeatureMatrix<double> fv(3, 1, {1, 2, 4});
  CHECK_THROWS_AS(
      ap_reference<double>(g, fv, nullptr, {BinaryOp::add, ReduceOp::sum}),
      std::invalid_argument);
  FeatureMatrix<double> bad_rows(2, 1, {1, 2});
  CHECK_THROWS_AS(
      ap_reference<double>(g, bad_rows, nullptr, {BinaryOp::copy_lhs, ReduceOp::sum}),
      std::invalid_argument);
}

TEST_CASE("copylhs/sum over all-ones features counts in-degrees") {
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    VertexId n = 1 + static_cast<VertexId>(rng.next_below(60));
    auto edges = testing::random_edges(rng, n, 0.1, true);
    CsrGraph g = build_csr(edges, n);
    FeatureMatrix<std::int64_t> ones(n, 1, 1);
    auto out = ap_reference<std::int64_t>(g, ones, nullptr,
                                          {BinaryOp::copy_lhs, ReduceOp::sum});
    auto deg = in_degrees(g);
    for (VertexId v = 0; v < n; ++v) CHECK(out.at(v, 0) == deg[v]);
  }
}

TEST_CASE("min output never exceeds max output on rows with in-edges") {
  Rng rng(31);
  VertexId n = 40;
  auto edges = testing::random_edges(rng, n, 0.1);
  CsrGraph g = build_csr(edges, n);
  auto fv = testing::random_int_features<std::int64_t>(rng, n, 3);
  auto lo = ap_reference<std::int64_t>(g, fv, nullptr, {BinaryOp::copy_lhs, ReduceOp::min});
  auto hi = ap_reference<std::int64_t>(g, fv, nullptr, {BinaryOp::copy_lhs, ReduceOp::max});
  for (VertexId v = 0; v < n; ++v) {
    if (g.in_degree(v) == 0) continue;
    for (std::int64_t j = 0; j < 3; ++j) CHECK(lo.at(v, j) <= hi.at(v, j));
  }
}

TEST_CASE("aggregation is linear in the vertex features for copylhs/sum") {
  Rng rng(37);
  VertexId n = 30;
  auto edges = testing::random_edges(rng, n, 0.15);
  CsrGraph g = build_csr(edges, n);
  OperatorSpec spec{BinaryOp::copy_lhs, ReduceOp::sum};

  SUBCASE("exact on integers") {
    auto x = testing::random_int_features<std::int64_t>(rng, n, 2);
    auto y = testing::random_int_features<std::int64_t>(rng, n, 2);
    FeatureMatrix<std::int64_t> combo(n, 2);
    for (std::size_t i = 0; i < combo.data().size(); ++i)
      combo.data()[i] = 3 * x.data()[i] + 2 * y.data()[i];
    auto ax = ap_reference<std::int64_t>(g, x, nullptr, spec);
    auto ay = ap_reference<std::int64_t>(g, y, nullptr, spec);
    auto ac = ap_reference<std::int64_t>(g, combo, nullptr, spec);
    for (std::size_t i = 0; i < ac.data().size(); ++i)
      CHECK(ac.data()[i] == 3 * ax.data()[i] + 2 * ay.data()[i]);
  }
  SUBCASE("within 1e-10 rel on f64") {
    FeatureMatrix<double> x(n, 2), y(n, 2);
    for (auto& v : x.data()) v = rng.next_real(-1, 1);
    for (auto& v : y.data()) v = rng.next_real(-1, 1);
    FeatureMatrix<double> combo(n, 2);
    for (std::size_t i = 0; i < combo.data().size(); ++i)
      combo.data()[i] = 0.5 * x.data()[i] - 1.25 * y.data()[i];
    auto ax = ap_reference<double>(g, x, nullptr, spec);
    auto ay = ap_reference<double>(g, y, nullptr, spec);
    auto ac = ap_reference<double>(g, combo, nullptr, spec);
    for (std::size_t i = 0; i < ac.data().size(); ++i) {
      double want = 0.5 * ax.data()[i] - 1.25 * ay.data()[i];
      CHECK(std::abs(ac.data()[i] - want) <=
            1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}
