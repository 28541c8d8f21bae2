#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace aggforge {

using VertexId = std::int64_t;
using EdgeId = std::int64_t;

struct Edge {
  VertexId src;
  VertexId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed graph in compressed sparse row form keyed by destination vertex:
// row v lists the sources u of edges u->v. edge_id runs parallel to col_idx
// and names the input-edge position, i.e. the row of the edge-feature matrix.
// Immutable after construction; safe to share across threads.
class CsrGraph {
 public:
  CsrGraph() : row_ptr_(1, 0) {}
  CsrGraph(std::vector<EdgeId> row_ptr, std::vector<VertexId> col_idx,
           std::vector<EdgeId> edge_id);

  VertexId num_vertices() const { return static_cast<VertexId>(row_ptr_.size()) - 1; }
  EdgeId num_edges() const { return static_cast<EdgeId>(col_idx_.size()); }

  // Sources of edges incident on v, in input-edge order.
  std::span<const VertexId> sources(VertexId v) const {
    return {col_idx_.data() + row_ptr_[v], col_idx_.data() + row_ptr_[v + 1]};
  }
  // Edge ids parallel to sources(v).
  std::span<const EdgeId> edge_ids(VertexId v) const {
    return {edge_id_.data() + row_ptr_[v], edge_id_.data() + row_ptr_[v + 1]};
  }

  EdgeId in_degree(VertexId v) const { return row_ptr_[v + 1] - row_ptr_[v]; }

  const std::vector<EdgeId>& row_ptr() const { return row_ptr_; }
  const std::vector<VertexId>& col_idx() const { return col_idx_; }
  const std::vector<EdgeId>& edge_id() const { return edge_id_; }

  // Recovers (src, dst) pairs indexed by original edge id.
  std::vector<Edge> edges() const;

 private:
  std::vector<EdgeId> row_ptr_;
  std::vector<VertexId> col_idx_;
  std::vector<EdgeId> edge_id_;
};

// Builds the destination-major CSR from an edge list. Duplicate edges are
// kept (multigraph); within each row, sources appear in input-edge order.
// Throws std::out_of_range naming the offending edge if an endpoint is
// outside [0, num_vertices).
CsrGraph build_csr(std::span<const Edge> edges, VertexId num_vertices);

// Reverses every edge; edge ids are preserved per edge, so
// transpose(transpose(g)) has the same edge multiset and ids as g.
CsrGraph transpose(const CsrGraph& g);

// deg[v] = number of in-edges of v.
std::vector<EdgeId> in_degrees(const CsrGraph& g);

}  // namespace aggforge
