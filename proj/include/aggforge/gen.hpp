#pragma once

#include <cstdint>
#include <vector>

#include "aggforge/csr.hpp"
#include "aggforge/feature_matrix.hpp"

namespace aggforge {

enum class GraphKind { erdos_renyi, barabasi_albert, sbm };

// Synthetic graph recipe. The generators draw an undirected structure;
// with duplicate_directed each undirected edge is emitted as two directed
// edges, otherwise as one (direction noted per generator below).
struct GenSpec {
  GraphKind kind = GraphKind::erdos_renyi;
  std::int64_t num_vertices = 0;
  double edge_prob = 0.0;                  // erdos_renyi
  int attach_count = 0;                    // barabasi_albert m
  std::vector<std::int64_t> block_sizes;   // sbm
  double p_in = 0.0, p_out = 0.0;          // sbm
  bool duplicate_directed = false;
  std::uint64_t seed = 0;
};

struct GeneratedGraph {
  std::int64_t num_vertices = 0;
  std::vector<Edge> edges;
  std::vector<int> labels;  // SBM: block index; others: empty
};

// Each unordered pair {u,v} independently with probability p.
// Non-duplicated direction: low index -> high index.
GeneratedGraph gen_erdos_renyi(std::int64_t n, double p, std::uint64_t seed,
                               bool duplicate_directed);

// Preferential attachment: each new vertex attaches to m existing vertices
// chosen proportionally to degree. Non-duplicated direction: attachment
// target -> newcomer, so newcomers aggregate from the hubs they joined.
GeneratedGraph gen_barabasi_albert(std::int64_t n, int m, std::uint64_t seed,
                                   bool duplicate_directed);

// Stochastic block model; labels carry the ground-truth block of each vertex.
// Non-duplicated direction: low index -> high index.
GeneratedGraph gen_sbm(const std::vector<std::int64_t>& block_sizes, double p_in,
                       double p_out, std::uint64_t seed, bool duplicate_directed);

GeneratedGraph generate(const GenSpec& spec);

// Row-wise uniform(-1, 1) features, seeded.
FeatureMatrix<double> gen_features(std::int64_t rows, std::int64_t dim, std::uint64_t seed);

// Uniform labels over [0, num_classes) for graphs without ground truth.
std::vector<int> gen_labels(std::int64_t rows, int num_classes, std::uint64_t seed);

}  // namespace aggforge
