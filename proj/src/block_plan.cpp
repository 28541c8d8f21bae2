#include "aggforge/block_plan.hpp"

#include <algorithm>
#include <stdexcept>

namespace aggforge {

BlockPlan plan_blocks(const CsrGraph& g, VertexId block_size) {
  if (block_size <= 0) throw std::invalid_argument("plan_blocks: block size must be >= 1");
  const VertexId n = g.num_vertices();
  const std::int64_t n_blocks = n == 0 ? 1 : (n + block_size - 1) / block_size;

  // One pass over the edges per phase, whatever the block count.
  std::vector<std::vector<EdgeId>> row_ptr(n_blocks);
  for (auto& rp : row_ptr) rp.assign(n + 1, 0);
  for (VertexId v = 0; v < n; ++v)
    for (VertexId u : g.sources(v)) row_ptr[u / block_size][v + 1]++;
  std::vector<std::vector<VertexId>> col_idx(n_blocks);
  std::vector<std::vector<EdgeId>> edge_id(n_blocks);
  std::vector<std::vector<EdgeId>> cursor(n_blocks);
  for (std::int64_t i = 0; i < n_blocks; ++i) {
    auto& rp = row_ptr[i];
    for (VertexId v = 0; v < n; ++v) rp[v + 1] += rp[v];
    col_idx[i].resize(rp[n]);
    edge_id[i].resize(rp[n]);
    cursor[i].assign(rp.begin(), rp.end() - 1);
  }
  for (VertexId v = 0; v < n; ++v) {
    auto srcs = g.sources(v);
    auto ids = g.edge_ids(v);
    for (std::size_t e = 0; e < srcs.size(); ++e) {
      const std::int64_t i = srcs[e] / block_size;
      EdgeId slot = cursor[i][v]++;
      col_idx[i][slot] = srcs[e];
      edge_id[i][slot] = ids[e];
    }
  }

  BlockPlan plan;
  plan.block_size = block_size;
  plan.blocks.reserve(n_blocks);
  for (std::int64_t i = 0; i < n_blocks; ++i)
    plan.blocks.emplace_back(std::move(row_ptr[i]), std::move(col_idx[i]),
                             std::move(edge_id[i]));
  return plan;
}

}  // namespace aggforge
