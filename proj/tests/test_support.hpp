#pragma once

#include <algorithm>
#include <vector>

#include "aggforge/csr.hpp"
#include "aggforge/feature_matrix.hpp"
#include "aggforge/rng.hpp"

namespace aggforge::testing {

// Random multigraph-free directed graph with roughly density * n^2 edges.
inline std::vector<Edge> random_edges(Rng& rng, VertexId n, double density,
                                      bool allow_self_loops = false) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = 0; v < n; ++v) {
      if (!allow_self_loops && u == v) continue;
      if (rng.next_bernoulli(density)) edges.push_back({u, v});
    }
  return edges;
}

// Symmetric variant: both directions of each sampled pair.
inline std::vector<Edge> random_symmetric_edges(Rng& rng, VertexId n, double density) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (rng.next_bernoulli(density)) {
        edges.push_back({u, v});
        edges.push_back({v, u});
      }
  return edges;
}

template <typename T>
inline FeatureMatrix<T> random_int_features(Rng& rng, std::int64_t rows, std::int64_t d,
                                            std::int64_t lo = 1, std::int64_t hi = 9) {
  FeatureMatrix<T> m(rows, d);
  for (auto& x : m.data())
    x = static_cast<T>(lo + static_cast<std::int64_t>(rng.next_below(hi - lo + 1)));
  return m;
}

inline std::vector<Edge> sorted_edges(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return edges;
}

}  // namespace aggforge::testing
