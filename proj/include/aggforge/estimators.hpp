#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aggforge {

// Work done by complete neighborhood aggregation at one hop:
// vertices * average degree * feature width, reported in billions of ops.
struct HopSpec {
  double num_vertices = 0;
  double avg_degree = 0;
  double feat_dim = 0;
};

struct WorkEstimate {
  std::vector<double> per_hop_bops;
  double total_bops = 0;

  std::string to_json() const;
};

WorkEstimate estimate_work(const std::vector<HopSpec>& hops);

// Element counts for a three-layer model with dimension chain f->h1->h2->l
// over N vertices: weights, input features, per-layer aggregation outputs
// and per-layer dense-layer outputs, all retained for backpropagation.
struct MemoryEstimate {
  std::int64_t weights = 0;
  std::int64_t input = 0;
  std::int64_t agg_outputs = 0;
  std::int64_t mlp_outputs = 0;
  std::int64_t total = 0;

  std::string to_json() const;
};

MemoryEstimate estimate_memory(std::int64_t n, std::int64_t f, std::int64_t h1,
                               std::int64_t h2, std::int64_t l);

}  // namespace aggforge
