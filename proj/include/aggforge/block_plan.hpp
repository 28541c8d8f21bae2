#pragma once

#include <cstdint>
#include <vector>

#include "aggforge/csr.hpp"

namespace aggforge {

// Source-vertex cache blocking: block i keeps the edges whose source lies in
// [i*B, min((i+1)*B, |V|)). Destination indexing is unchanged, so the blocks
// can be folded into one output matrix pass after pass.
struct BlockPlan {
  VertexId block_size = 0;                 // B
  std::vector<CsrGraph> blocks;            // A_0..A_{n_B-1}

  std::int64_t num_blocks() const { return static_cast<std::int64_t>(blocks.size()); }
  VertexId num_vertices() const { return blocks.empty() ? 0 : blocks[0].num_vertices(); }
  EdgeId num_edges() const {
    EdgeId n = 0;
    for (const auto& b : blocks) n += b.num_edges();
    return n;
  }
};

// n_B = ceil(|V| / B). Throws std::invalid_argument if B == 0.
BlockPlan plan_blocks(const CsrGraph& g, VertexId block_size);

}  // namespace aggforge
