#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aggforge/csr.hpp"

namespace aggforge {

// Vertex-cut edge partitioning: each edge lives in exactly one partition, a
// vertex is present wherever one of its edges landed. Vertices present in
// two or more partitions are split vertices; their per-partition copies are
// clones.
struct PartitionSet {
  int num_partitions = 0;
  VertexId num_vertices = 0;
  double slack = 1.0;
  std::vector<std::vector<EdgeId>> edge_ids;     // global edge ids per partition
  std::vector<Edge> edges;                       // indexed by global edge id
  std::vector<std::vector<int>> presence;        // vertex -> sorted partition list
  std::vector<EdgeId> load;                      // edges per partition

  EdgeId num_edges() const { return static_cast<EdgeId>(edges.size()); }
  EdgeId capacity() const;
  bool is_split(VertexId v) const { return presence[v].size() >= 2; }
};

// Greedy least-loaded assignment: an edge goes to a partition that already
// holds one of its endpoints (both-endpoint partitions preferred) and is
// under capacity; otherwise to the globally least-loaded partition. Ties
// break to the lowest partition index, so the result is a pure function of
// the edge order.
PartitionSet libra_partition(std::span<const Edge> edges, VertexId num_vertices, int k,
                             double slack = 1.1);

// Average number of clones per vertex that has at least one incident edge.
double replication_factor(const PartitionSet& ps);

// max_p load[p] / (|E|/k); 1.0 is a perfectly even split.
double edge_balance(const PartitionSet& ps);

// Consecutive local-ID ranges, partition 0 first; within a partition local
// IDs follow ascending global ID. clone_lists maps each split vertex to the
// local IDs of all its clones.
struct VertexMap {
  struct CloneList {
    VertexId global_id;
    std::vector<VertexId> locals;  // one local id per containing partition, ascending rank
  };
  std::vector<VertexId> range_lo;              // per partition, inclusive
  std::vector<VertexId> range_hi;              // per partition, exclusive
  std::vector<std::vector<VertexId>> local_to_global;  // per partition
  std::vector<CloneList> clone_lists;          // split vertices only, ascending global id

  int partition_of(VertexId local) const;
  VertexId global_of(VertexId local) const;
  VertexId local_in(const PartitionSet& ps, int p, VertexId global) const;
  VertexId total_locals() const { return range_hi.empty() ? 0 : range_hi.back(); }
};

VertexMap build_vertex_map(const PartitionSet& ps);

// One 1-level sync tree per split vertex: a root clone drawn uniformly from
// the clone list (stream seeded by (seed, global id)), the rest leaves.
struct SplitForest {
  struct Tree {
    VertexId global_id;
    VertexId root_local;
    std::vector<VertexId> leaves_local;
  };
  std::uint64_t seed = 0;
  std::vector<Tree> trees;  // ascending global id
};

SplitForest build_split_trees(const VertexMap& vm, std::uint64_t seed);

struct PartitionStats {
  int num_partitions = 0;
  double rf = 0.0;
  double balance = 0.0;
  std::vector<double> split_pct;  // share of split vertices per partition

  std::string to_json() const;
};

PartitionStats partition_stats(const PartitionSet& ps);

// Local-ID edge list for one partition, in global-edge-id order. Endpoints
// are partition-local row indices (local id - range_lo[p]).
std::vector<Edge> partition_local_edges(const PartitionSet& ps, const VertexMap& vm, int p);

}  // namespace aggforge
