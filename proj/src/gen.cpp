#include "aggforge/gen.hpp"

#include <stdexcept>

#include "aggforge/rng.hpp"

namespace aggforge {

namespace {

void emit(std::vector<Edge>& edges, VertexId a, VertexId b, bool duplicate) {
  edges.push_back({a, b});
  if (duplicate) edges.push_back({b, a});
}

}  // namespace

GeneratedGraph gen_erdos_renyi(std::int64_t n, double p, std::uint64_t seed,
                               bool duplicate_directed) {
  if (n < 0 || p < 0.0 || p > 1.0)
    throw std::invalid_argument("gen_erdos_renyi: invalid parameters");
  GeneratedGraph g;
  g.num_vertices = n;
  Rng rng(mix_seed(seed, 0x45523031));
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (rng.next_bernoulli(p)) emit(g.edges, u, v, duplicate_directed);
  return g;
}

GeneratedGraph gen_barabasi_albert(std::int64_t n, int m, std::uint64_t seed,
                                   bool duplicate_directed) {
  if (n < 0 || m < 1 || (n > 0 && m >= n))
    throw std::invalid_argument("gen_barabasi_albert: need 1 <= m < n");
  GeneratedGraph g;
  g.num_vertices = n;
  Rng rng(mix_seed(seed, 0x42413031));
  // Repeated-vertex list: each endpoint occurrence is one share of the
  // degree distribution, so uniform picks are preferential picks.
  std::vector<VertexId> shares;
  for (VertexId v = m; v < n; ++v) {
    std::vector<VertexId> targets;
    while (static_cast<int>(targets.size()) < m) {
      VertexId t;
      if (shares.empty()) {
        t = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(v)));
      } else {
        t = shares[rng.next_below(shares.size())];
      }
      bool dup = false;
      for (VertexId prev : targets) dup = dup || prev == t;
      if (!dup) targets.push_back(t);
    }
    for (VertexId t : targets) {
      emit(g.edges, t, v, duplicate_directed);
      shares.push_back(t);
      shares.push_back(v);
    }
  }
  return g;
}

GeneratedGraph gen_sbm(const std::vector<std::int64_t>& block_sizes, double p_in,
                       double p_out, std::uint64_t seed, bool duplicate_directed) {
  if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0 || block_sizes.empty())
    throw std::invalid_argument("gen_sbm: invalid parameters");
  GeneratedGraph g;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    if (block_sizes[b] < 0) throw std::invalid_argument("gen_sbm: negative block size");
    for (std::int64_t i = 0; i < block_sizes[b]; ++i) g.labels.push_back(static_cast<int>(b));
  }
  g.num_vertices = static_cast<std::int64_t>(g.labels.size());
  Rng rng(mix_seed(seed, 0x53424d31));
  for (VertexId u = 0; u < g.num_vertices; ++u) {
    for (VertexId v = u + 1; v < g.num_vertices; ++v) {
      double p = g.labels[u] == g.labels[v] ? p_in : p_out;
      if (rng.next_bernoulli(p)) emit(g.edges, u, v, duplicate_directed);
    }
  }
  return g;
}

GeneratedGraph generate(const GenSpec& spec) {
  switch (spec.kind) {
    case GraphKind::erdos_renyi:
      return gen_erdos_renyi(spec.num_vertices, spec.edge_prob, spec.seed,
                             spec.duplicate_directed);
    case GraphKind::barabasi_albert:
      return gen_barabasi_albert(spec.num_vertices, spec.attach_count, spec.seed,
                                 spec.duplicate_directed);
    case GraphKind::sbm:
      return gen_sbm(spec.block_sizes, spec.p_in, spec.p_out, spec.seed,
                     spec.duplicate_directed);
  }
  throw std::invalid_argument("generate: unknown graph kind");
}

FeatureMatrix<double> gen_features(std::int64_t rows, std::int64_t dim, std::uint64_t seed) {
  FeatureMatrix<double> f(rows, dim);
  Rng rng(mix_seed(seed, 0x46454154));
  for (auto& x : f.data()) x = rng.next_real(-1.0, 1.0);
  return f;
}

std::vector<int> gen_labels(std::int64_t rows, int num_classes, std::uint64_t seed) {
  if (num_classes < 1) throw std::invalid_argument("gen_labels: need >= 1 class");
  std::vector<int> labels(rows);
  Rng rng(mix_seed(seed, 0x4c424c31));
  for (auto& l : labels) l = static_cast<int>(rng.next_below(num_classes));
  return labels;
}

}  // namespace aggforge
