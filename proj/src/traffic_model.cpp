#include "aggforge/traffic_model.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace aggforge {

TrafficReport estimate_traffic(const BlockPlan& plan, std::int64_t d,
                               std::int64_t elem_bytes, std::int64_t cache_bytes,
                               bool uses_fe) {
  TrafficReport r;
  const std::int64_t row_bytes = d * elem_bytes;
  std::int64_t total_nnz = 0;

  std::vector<char> seen(plan.num_vertices(), 0);
  for (const CsrGraph& block : plan.blocks) {
    const std::int64_t nnz = block.num_edges();
    total_nnz += nnz;

    // Distinct active sources in this block.
    std::fill(seen.begin(), seen.end(), 0);
    std::int64_t active_sources = 0;
    for (VertexId u : block.col_idx()) {
      if (!seen[u]) {
        seen[u] = 1;
        ++active_sources;
      }
    }
    // Destinations touched by this block: one read + one write pass each.
    std::int64_t touched_dests = 0;
    for (VertexId v = 0; v < block.num_vertices(); ++v)
      if (block.in_degree(v) > 0) ++touched_dests;

    const bool fits = active_sources * row_bytes <= cache_bytes;
    r.bytes_read_fv += (fits ? active_sources : nnz) * row_bytes;
    r.bytes_rw_fo += 2 * touched_dests * row_bytes;
  }

  r.bytes_read_fe = uses_fe ? total_nnz * row_bytes : 0;
  r.total_io = r.bytes_read_fv + r.bytes_rw_fo + r.bytes_read_fe;
  r.reuse_fv = r.bytes_read_fv == 0
                   ? 1.0
                   : static_cast<double>(total_nnz * row_bytes) /
                         static_cast<double>(r.bytes_read_fv);
  return r;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "n_B,bytes_read_fV,bytes_rw_fO,bytes_read_fE,total_io,reuse_fV,wall_time_ns\n";
  for (const auto& row : rows) {
    os << row.n_blocks << ',' << row.traffic.bytes_read_fv << ',' << row.traffic.bytes_rw_fo
       << ',' << row.traffic.bytes_read_fe << ',' << row.traffic.total_io << ','
       << row.traffic.reuse_fv << ',' << row.wall_time_ns << '\n';
  }
  return os.str();
}

VertexId default_block_size(VertexId num_vertices, std::int64_t d, std::int64_t elem_bytes,
                            std::int64_t cache_bytes) {
  const std::int64_t row_bytes = std::max<std::int64_t>(1, d * elem_bytes);
  VertexId b = static_cast<VertexId>(cache_bytes / 2 / row_bytes);
  b = std::clamp<VertexId>(b, 1, std::max<VertexId>(1, num_vertices));
  return b;
}

}  // namespace aggforge
