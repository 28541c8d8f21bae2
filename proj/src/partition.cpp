#include "aggforge/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aggforge/rng.hpp"

namespace aggforge {

EdgeId PartitionSet::capacity() const {
  return static_cast<EdgeId>(
      std::ceil(slack * static_cast<double>(num_edges()) / num_partitions));
}

namespace {

bool contains(const std::vector<int>& sorted, int p) {
  return std::binary_search(sorted.begin(), sorted.end(), p);
}

void insert_sorted(std::vector<int>& sorted, int p) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), p);
  if (it == sorted.end() || *it != p) sorted.insert(it, p);
}

}  // namespace

PartitionSet libra_partition(std::span<const Edge> edges, VertexId num_vertices, int k,
                             double slack) {
  if (k < 1) throw std::invalid_argument("libra_partition: k must be >= 1");
  if (slack < 1.0) throw std::invalid_argument("libra_partition: slack must be >= 1");
  if (num_vertices == 0 && !edges.empty())
    throw std::invalid_argument("libra_partition: edges given but num_vertices is 0");

  PartitionSet ps;
  ps.num_partitions = k;
  ps.num_vertices = num_vertices;
  ps.slack = slack;
  ps.edges.assign(edges.begin(), edges.end());
  ps.edge_ids.resize(k);
  ps.presence.resize(num_vertices);
  ps.load.assign(k, 0);

  const EdgeId cap = static_cast<EdgeId>(
      std::ceil(slack * static_cast<double>(edges.size()) / k));

  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.src < 0 || e.src >= num_vertices || e.dst < 0 || e.dst >= num_vertices)
      throw std::out_of_range("libra_partition: edge endpoint out of range");

    // Scan the union of both endpoints' partitions in ascending index order;
    // with strict load comparison this breaks ties toward the lowest index.
    int best = -1;
    bool best_both = false;
    const auto& ls = ps.presence[e.src];
    const auto& ld = ps.presence[e.dst];
    std::size_t a = 0, b = 0;
    while (a < ls.size() || b < ld.size()) {
      int p;
      if (b == ld.size() || (a < ls.size() && ls[a] <= ld[b])) {
        p = ls[a];
        if (b < ld.size() && ld[b] == p) ++b;
        ++a;
      } else {
        p = ld[b];
        ++b;
      }
      if (ps.load[p] >= cap) continue;
      bool both = contains(ls, p) && contains(ld, p);
      if (best == -1 || (both && !best_both) ||
          (both == best_both && ps.load[p] < ps.load[best])) {
        best = p;
        best_both = both;
      }
    }
    if (best == -1) {
      best = 0;
      for (int p = 1; p < k; ++p)
        if (ps.load[p] < ps.load[best]) best = p;
    }

    ps.edge_ids[best].push_back(static_cast<EdgeId>(i));
    ps.load[best]++;
    insert_sorted(ps.presence[e.src], best);
    insert_sorted(ps.presence[e.dst], best);
  }
  return ps;
}

double replication_factor(const PartitionSet& ps) {
  std::int64_t clones = 0;
  std::int64_t active = 0;
  for (VertexId v = 0; v < ps.num_vertices; ++v) {
    if (ps.presence[v].empty()) continue;
    ++active;
    clones += static_cast<std::int64_t>(ps.presence[v].size());
  }
  return active == 0 ? 1.0 : static_cast<double>(clones) / static_cast<double>(active);
}

double edge_balance(const PartitionSet& ps) {
  if (ps.num_edges() == 0) throw std::invalid_argument("edge_balance: no edges");
  EdgeId max_load = *std::max_element(ps.load.begin(), ps.load.end());
  return static_cast<double>(max_load) /
         (static_cast<double>(ps.num_edges()) / ps.num_partitions);
}

int VertexMap::partition_of(VertexId local) const {
  for (std::size_t p = 0; p < range_lo.size(); ++p)
    if (local >= range_lo[p] && local < range_hi[p]) return static_cast<int>(p);
  throw std::out_of_range("VertexMap: local id out of range");
}

VertexId VertexMap::global_of(VertexId local) const {
  int p = partition_of(local);
  return local_to_global[p][local - range_lo[p]];
}

VertexId VertexMap::local_in(const PartitionSet&, int p, VertexId global) const {
  const auto& l2g = local_to_global[p];
  auto it = std::lower_bound(l2g.begin(), l2g.end(), global);
  if (it == l2g.end() || *it != global)
    throw std::out_of_range("VertexMap: vertex not present in partition");
  return range_lo[p] + static_cast<VertexId>(it - l2g.begin());
}

VertexMap build_vertex_map(const PartitionSet& ps) {
  VertexMap vm;
  const int k = ps.num_partitions;
  vm.local_to_global.resize(k);
  for (VertexId v = 0; v < ps.num_vertices; ++v)
    for (int p : ps.presence[v]) vm.local_to_global[p].push_back(v);
  // presence iteration is ascending in v, so each table is already sorted.

  VertexId next = 0;
  for (int p = 0; p < k; ++p) {
    vm.range_lo.push_back(next);
    next += static_cast<VertexId>(vm.local_to_global[p].size());
    vm.range_hi.push_back(next);
  }

  for (VertexId v = 0; v < ps.num_vertices; ++v) {
    if (!ps.is_split(v)) continue;
    VertexMap::CloneList cl;
    cl.global_id = v;
    for (int p : ps.presence[v]) cl.locals.push_back(vm.local_in(ps, p, v));
    vm.clone_lists.push_back(std::move(cl));
  }
  return vm;
}

SplitForest build_split_trees(const VertexMap& vm, std::uint64_t seed) {
  SplitForest forest;
  forest.seed = seed;
  forest.trees.reserve(vm.clone_lists.size());
  for (const auto& cl : vm.clone_lists) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cl.global_id)));
    std::size_t root = rng.next_below(cl.locals.size());
    SplitForest::Tree t;
    t.global_id = cl.global_id;
    t.root_local = cl.locals[root];
    for (std::size_t i = 0; i < cl.locals.size(); ++i)
      if (i != root) t.leaves_local.push_back(cl.locals[i]);
    forest.trees.push_back(std::move(t));
  }
  return forest;
}

PartitionStats partition_stats(const PartitionSet& ps) {
  PartitionStats st;
  st.num_partitions = ps.num_partitions;
  st.rf = replication_factor(ps);
  st.balance = ps.num_edges() == 0 ? 1.0 : edge_balance(ps);
  st.split_pct.assign(ps.num_partitions, 0.0);
  std::vector<std::int64_t> present(ps.num_partitions, 0), split(ps.num_partitions, 0);
  for (VertexId v = 0; v < ps.num_vertices; ++v) {
    for (int p : ps.presence[v]) {
      present[p]++;
      if (ps.is_split(v)) split[p]++;
    }
  }
  for (int p = 0; p < ps.num_partitions; ++p)
    st.split_pct[p] = present[p] == 0 ? 0.0
                                      : 100.0 * static_cast<double>(split[p]) /
                                            static_cast<double>(present[p]);
  return st;
}

std::string PartitionStats::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"k\":" << num_partitions << ",\"rf\":" << rf << ",\"balance\":" << balance
     << ",\"split_pct\":[";
  for (std::size_t i = 0; i < split_pct.size(); ++i)
    os << (i ? "," : "") << split_pct[i];
  os << "]}";
  return os.str();
}

std::vector<Edge> partition_local_edges(const PartitionSet& ps, const VertexMap& vm, int p) {
  std::vector<Edge> out;
  out.reserve(ps.edge_ids[p].size());
  const VertexId lo = vm.range_lo[p];
  for (EdgeId id : ps.edge_ids[p]) {
    const Edge& e = ps.edges[id];
    out.push_back({vm.local_in(ps, p, e.src) - lo, vm.local_in(ps, p, e.dst) - lo});
  }
  return out;
}

}  // namespace aggforge
