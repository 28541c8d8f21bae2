#pragma once

#include <atomic>
#include <barrier>
#include <cstdlib>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "aggforge/block_plan.hpp"
#include "aggforge/reference_kernel.hpp"

namespace aggforge {

// Dynamic scheduling contract: workers claim contiguous chunks of destination
// vertices from a shared cursor. Each destination row is owned by exactly one
// chunk, so no two workers ever write the same output row.
struct SchedSpec {
  int workers = 1;
  VertexId chunk = 64;
};

// Default worker count: AGGFORGE_WORKERS if set, else hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("AGGFORGE_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

// Inner kernel for one (block, destination row) pair: load the accumulator
// row once, fold every block-local neighbor into it, store once.
template <typename T>
inline void fold_row(const CsrGraph& block, VertexId v, const FeatureMatrix<T>& fv,
                     std::type_identity_t<const FeatureMatrix<T>*> fe, const OperatorSpec& spec,
                     std::span<T> out_row, std::vector<T>& acc) {
  auto srcs = block.sources(v);
  if (srcs.empty()) return;
  auto ids = block.edge_ids(v);
  const std::int64_t d = fv.dim();
  acc.assign(out_row.begin(), out_row.end());
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    auto src_row = fv.row(srcs[i]);
    for (std::int64_t j = 0; j < d; ++j) {
      T y = fe ? fe->at(ids[i], j) : T{};
      acc[j] = apply_elem(spec, src_row[j], y, acc[j]);
    }
  }
  std::copy(acc.begin(), acc.end(), out_row.begin());
}

}  // namespace detail

// Blocked aggregation without the empty-row rewrite; accumulates on top of
// whatever `out` currently holds (callers seed it with the reduce identity).
// Accumulation order per row is fixed at (block-major, then CSR row order),
// so the result is bitwise independent of workers and chunk size.
template <typename T>
void ap_blocked_into(const BlockPlan& plan, const FeatureMatrix<T>& fv,
                     std::type_identity_t<const FeatureMatrix<T>*> fe, const OperatorSpec& spec,
                     const SchedSpec& sched, FeatureMatrix<T>& out) {
  if (fv.rows() != plan.num_vertices())
    throw std::invalid_argument("ap_blocked: vertex feature rows != num_vertices");
  if (uses_edge_operand(spec.binary)) {
    if (fe == nullptr) throw std::invalid_argument("ap_blocked: operator requires edge features");
    if (fe->rows() != plan.num_edges() || fe->dim() != fv.dim())
      throw std::invalid_argument("ap_blocked: edge feature shape mismatch");
  }
  const VertexId n = plan.num_vertices();
  const VertexId chunk = sched.chunk < 1 ? 1 : sched.chunk;

  if (sched.workers <= 1) {
    std::vector<T> acc;
    for (const CsrGraph& block : plan.blocks)
      for (VertexId v = 0; v < n; ++v)
        detail::fold_row(block, v, fv, fe, spec, out.row(v), acc);
    return;
  }

  // One pool for the whole call: workers re-claim chunks from the shared
  // cursor block after block, with a barrier (and cursor reset) in between
  // so no row is touched by two blocks at once.
  std::atomic<VertexId> cursor{0};
  std::barrier sync(sched.workers, [&cursor]() noexcept {
    cursor.store(0, std::memory_order_relaxed);
  });
  auto work = [&] {
    std::vector<T> acc;
    for (const CsrGraph& block : plan.blocks) {
      for (;;) {
        VertexId lo = cursor.fetch_add(chunk, std::memory_order_relaxed);
        if (lo >= n) break;
        VertexId hi = std::min<VertexId>(lo + chunk, n);
        for (VertexId v = lo; v < hi; ++v)
          detail::fold_row(block, v, fv, fe, spec, out.row(v), acc);
      }
      sync.arrive_and_wait();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(sched.workers - 1);
  for (int t = 1; t < sched.workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

// Optimized aggregation primitive: source-vertex blocking, dynamically
// scheduled destination chunks, accumulate-then-store inner kernel. Equals
// ap_reference bit-for-bit on exact element types; on f32 sum only the
// block boundaries reassociate.
template <typename T>
FeatureMatrix<T> ap_blocked(const BlockPlan& plan, const FeatureMatrix<T>& fv,
                            std::type_identity_t<const FeatureMatrix<T>*> fe, const OperatorSpec& spec,
                            const SchedSpec& sched) {
  FeatureMatrix<T> out(plan.num_vertices(), fv.dim(), reduce_identity<T>(spec.reduce));
  ap_blocked_into(plan, fv, fe, spec, sched, out);
  for (VertexId v = 0; v < plan.num_vertices(); ++v) {
    bool empty = true;
    for (const CsrGraph& block : plan.blocks) {
      if (block.in_degree(v) != 0) {
        empty = false;
        break;
      }
    }
    if (empty)
      for (auto& x : out.row(v)) x = T{};
  }
  return out;
}

}  // namespace aggforge
