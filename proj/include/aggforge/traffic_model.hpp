#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "aggforge/blocked_kernel.hpp"

namespace aggforge {

// Analytic memory-traffic estimate for one blocked aggregation pass.
// Two-regime proxy: a block whose active source rows fit in cache loads each
// source row once; otherwise every edge re-fetches its source row. Not
// calibrated to any particular cache hierarchy.
struct TrafficReport {
  std::int64_t bytes_read_fv = 0;
  std::int64_t bytes_rw_fo = 0;
  std::int64_t bytes_read_fe = 0;
  std::int64_t total_io = 0;
  double reuse_fv = 1.0;
};

TrafficReport estimate_traffic(const BlockPlan& plan, std::int64_t d,
                               std::int64_t elem_bytes, std::int64_t cache_bytes,
                               bool uses_fe);

struct SweepRow {
  std::int64_t n_blocks = 0;
  TrafficReport traffic;
  std::int64_t wall_time_ns = 0;
};

// One row per requested block size, ascending n_B; wall time is a single
// measured ap_blocked run per size.
template <typename T>
std::vector<SweepRow> sweep_blocks(const CsrGraph& g, const FeatureMatrix<T>& fv,
                                   const OperatorSpec& spec,
                                   const std::vector<VertexId>& sizes,
                                   std::int64_t cache_bytes, const SchedSpec& sched) {
  if (sizes.empty()) throw std::invalid_argument("sweep_blocks: empty size list");
  std::vector<SweepRow> rows;
  rows.reserve(sizes.size());
  for (VertexId b : sizes) {
    BlockPlan plan = plan_blocks(g, b);
    SweepRow row;
    row.n_blocks = plan.num_blocks();
    row.traffic = estimate_traffic(plan, fv.dim(), sizeof(T), cache_bytes,
                                   uses_edge_operand(spec.binary));
    FeatureMatrix<T> fe;
    if (uses_edge_operand(spec.binary)) fe = FeatureMatrix<T>(g.num_edges(), fv.dim(), T{1});
    auto t0 = std::chrono::steady_clock::now();
    auto out = ap_blocked(plan, fv, uses_edge_operand(spec.binary) ? &fe : nullptr, spec, sched);
    auto t1 = std::chrono::steady_clock::now();
    (void)out;
    row.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.n_blocks < b.n_blocks; });
  return rows;
}

// CSV emission with header n_B,bytes_read_fV,bytes_rw_fO,bytes_read_fE,total_io,reuse_fV,wall_time_ns
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Default block size: largest B whose worst-case fV block footprint
// (B rows) stays within half the cache. Best B is workload-dependent;
// this is only a starting point.
VertexId default_block_size(VertexId num_vertices, std::int64_t d, std::int64_t elem_bytes,
                            std::int64_t cache_bytes);

}  // namespace aggforge
