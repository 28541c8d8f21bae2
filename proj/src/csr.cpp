#include <algorithm>
#include "aggforge/csr.hpp"

#include <stdexcept>
#include <string>

namespace aggforge {

CsrGraph::CsrGraph(std::vector<EdgeId> row_ptr, std::vector<VertexId> col_idx,
                   std::vector<EdgeId> edge_id)
    : row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      edge_id_(std::move(edge_id)) {
  if (row_ptr_.empty() || row_ptr_.front() != 0 ||
      row_ptr_.back() != static_cast<EdgeId>(col_idx_.size()) ||
      col_idx_.size() != edge_id_.size()) {
    throw std::invalid_argument("CsrGraph: inconsistent arrays");
  }
}

std::vector<Edge> CsrGraph::edges() const {
  // Edge ids are global positions; subgraph views (blocks, partitions) keep
  // them sparse, so sort rather than index.
  std::vector<std::pair<EdgeId, Edge>> tagged;
  tagged.reserve(num_edges());
  for (VertexId v = 0; v < num_vertices(); ++v) {
    auto srcs = sources(v);
    auto ids = edge_ids(v);
    for (std::size_t i = 0; i < srcs.size(); ++i) tagged.push_back({ids[i], {srcs[i], v}});
  }
  std::sort(tagged.begin(), tagged.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Edge> out;
  out.reserve(tagged.size());
  for (const auto& [id, e] : tagged) out.push_back(e);
  return out;
}

CsrGraph build_csr(std::span<const Edge> edges, VertexId num_vertices) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.src < 0 || e.src >= num_vertices || e.dst < 0 || e.dst >= num_vertices) {
      throw std::out_of_range("build_csr: edge " + std::to_string(i) + " = (" +
                              std::to_string(e.src) + "," + std::to_string(e.dst) +
                              ") out of range for " + std::to_string(num_vertices) +
                              " vertices");
    }
  }

  std::vector<EdgeId> row_ptr(num_vertices + 1, 0);
  for (const auto& e : edges) row_ptr[e.dst + 1]++;
  for (VertexId v = 0; v < num_vertices; ++v) row_ptr[v + 1] += row_ptr[v];

  std::vector<VertexId> col_idx(edges.size());
  std::vector<EdgeId> edge_id(edges.size());
  std::vector<EdgeId> cursor(row_ptr.begin(), row_ptr.end() - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    EdgeId slot = cursor[edges[i].dst]++;
    col_idx[slot] = edges[i].src;
    edge_id[slot] = static_cast<EdgeId>(i);
  }
  return CsrGraph(std::move(row_ptr), std::move(col_idx), std::move(edge_id));
}

CsrGraph transpose(const CsrGraph& g) {
  const VertexId n = g.num_vertices();
  std::vector<EdgeId> row_ptr(n + 1, 0);
  for (const VertexId u : g.col_idx()) row_ptr[u + 1]++;
  for (VertexId v = 0; v < n; ++v) row_ptr[v + 1] += row_ptr[v];

  std::vector<VertexId> col_idx(g.num_edges());
  std::vector<EdgeId> edge_id(g.num_edges());
  std::vector<EdgeId> cursor(row_ptr.begin(), row_ptr.end() - 1);
  for (VertexId v = 0; v < n; ++v) {
    auto srcs = g.sources(v);
    auto ids = g.edge_ids(v);
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      EdgeId slot = cursor[srcs[i]]++;
      col_idx[slot] = v;
      edge_id[slot] = ids[i];
    }
  }
  return CsrGraph(std::move(row_ptr), std::move(col_idx), std::move(edge_id));
}

std::vector<EdgeId> in_degrees(const CsrGraph& g) {
  std::vector<EdgeId> deg(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) deg[v] = g.in_degree(v);
  return deg;
}

}  // namespace aggforge
