#pragma once

#include <stdexcept>
#include <type_traits>

#include "aggforge/csr.hpp"
#include "aggforge/feature_matrix.hpp"
#include "aggforge/ops.hpp"

namespace aggforge {

template <typename T>
void check_ap_inputs(const CsrGraph& g, const FeatureMatrix<T>& fv,
                     std::type_identity_t<const FeatureMatrix<T>*> fe, const OperatorSpec& spec) {
  if (fv.rows() != g.num_vertices())
    throw std::invalid_argument("aggregate: vertex feature rows != num_vertices");
  if (uses_edge_operand(spec.binary)) {
    if (fe == nullptr)
      throw std::invalid_argument("aggregate: operator requires edge features");
    if (fe->rows() != g.num_edges())
      throw std::invalid_argument("aggregate: edge feature rows != num_edges");
    if (fe->dim() != fv.dim())
      throw std::invalid_argument("aggregate: edge feature dim != vertex feature dim");
  }
}

// Plain double loop over destinations and their in-neighbors, in row order.
// Output rows start at the reduce identity; rows left untouched keep it.
// This is the ground-truth evaluation every optimized path is tested against.
template <typename T>
FeatureMatrix<T> ap_reference_raw(const CsrGraph& g, const FeatureMatrix<T>& fv,
                                  std::type_identity_t<const FeatureMatrix<T>*> fe, const OperatorSpec& spec) {
  check_ap_inputs(g, fv, fe, spec);
  const std::int64_t d = fv.dim();
  FeatureMatrix<T> out(g.num_vertices(), d, reduce_identity<T>(spec.reduce));
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    auto srcs = g.sources(v);
    auto ids = g.edge_ids(v);
    auto out_row = out.row(v);
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      auto src_row = fv.row(srcs[i]);
      for (std::int64_t j = 0; j < d; ++j) {
        T y = fe ? fe->at(ids[i], j) : T{};
        out_row[j] = apply_elem(spec, src_row[j], y, out_row[j]);
      }
    }
  }
  return out;
}

// Rewrites rows with no in-edges to the zero vector, so empty-neighborhood
// output is finite and identical across reductions.
template <typename T>
void zero_empty_rows(FeatureMatrix<T>& out, const CsrGraph& g) {
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.in_degree(v) == 0) {
      for (auto& x : out.row(v)) x = T{};
    }
  }
}

// Reference aggregation primitive: out[v] = reduce over in-edges u->v of
// combine(fv[u], fe[e_uv]), empty rows zeroed.
template <typename T>
FeatureMatrix<T> ap_reference(const CsrGraph& g, const FeatureMatrix<T>& fv,
                              std::type_identity_t<const FeatureMatrix<T>*> fe, const OperatorSpec& spec) {
  FeatureMatrix<T> out = ap_reference_raw(g, fv, fe, spec);
  zero_empty_rows(out, g);
  return out;
}

}  // namespace aggforge
