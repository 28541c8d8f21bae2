#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "aggforge/blocked_kernel.hpp"
#include "aggforge/partition.hpp"

namespace aggforge {

// The three distributed aggregation variants: no communication at all,
// synchronous complete-neighborhood exchange, and exchange delayed by r
// epochs over round-robin bins of split trees.
enum class DrpaAlgo { zero_comm, cd0, cdr };

std::string to_string(DrpaAlgo algo);
DrpaAlgo parse_drpa_algo(const std::string& name);

// Round-robin bin schedule over split-tree indices. With delay r >= 1 the
// forest is cut into r bins of floor(|v_s|/r) trees, remainder appended to
// the last bin; r = 0 degenerates to a single bin holding every tree.
struct DrpaSchedule {
  int delay = 0;
  std::vector<std::vector<int>> bins;
};

DrpaSchedule make_schedule(const SplitForest& forest, int delay);

enum class MsgKind { leaf_to_root, root_to_leaf };

inline std::string to_string(MsgKind k) {
  return k == MsgKind::leaf_to_root ? "leaf_to_root" : "root_to_leaf";
}

// Which matrix family a message synchronizes: forward aggregates or the
// backward gradient rows that retrace the same trees.
enum class SyncChannel { aggregate, gradient };

template <typename T>
struct AggMessage {
  int src_rank = 0;
  int dst_rank = 0;
  MsgKind kind = MsgKind::leaf_to_root;
  int layer = 0;
  SyncChannel channel = SyncChannel::aggregate;
  std::int64_t send_epoch = 0;
  struct Entry {
    int tree_id;
    std::int64_t degree;   // sender's effective in-degree; rides along, not
                           // counted in the element volume
    std::vector<T> values;
  };
  std::vector<Entry> payload;
};

struct CommRecord {
  std::int64_t epoch = 0;
  int rank = 0;
  int layer = 0;
  MsgKind kind = MsgKind::leaf_to_root;
  std::int64_t elements_sent = 0;
  std::int64_t elements_received = 0;
};

struct DeliveryTrace {
  std::int64_t send_epoch = 0;
  std::int64_t consume_epoch = 0;
  MsgKind kind = MsgKind::leaf_to_root;
  int layer = 0;
  int tree_id = 0;
};

// One simulated rank: the partition-local graph, its block plan, per-layer
// aggregate state and mailboxes. Ranks share nothing mutable; every
// cross-rank effect flows through messages.
template <typename T>
struct RankState {
  int rank = 0;
  CsrGraph graph;            // local ids, destination-major
  CsrGraph graph_transposed; // for backward gradient flow
  BlockPlan plan;
  std::vector<std::int64_t> local_in_degree;
  std::vector<std::int64_t> global_in_degree;

  // Aggregate rows per layer, kept at the reduce identity internally;
  // eff_degree[layer][row] counts the in-edges the row currently reflects.
  std::vector<FeatureMatrix<T>> agg;
  std::vector<std::vector<std::int64_t>> eff_degree;

  using MailKey = std::tuple<int /*layer*/, SyncChannel, MsgKind>;
  std::map<MailKey, std::map<std::int64_t, std::vector<AggMessage<T>>>> mailbox;

  std::vector<AggMessage<T>> outbox;
  std::map<std::tuple<std::int64_t, int, MsgKind>, std::pair<std::int64_t, std::int64_t>>
      volume;  // (epoch, layer, kind) -> (sent, received)
  std::vector<DeliveryTrace> trace;
};

// In-process simulated cluster running one of {0c, cd-0, cd-r} over the
// partitions of a vertex-cut. Ranks can be stepped round-robin on one thread
// or on one worker thread each; both schedules produce bitwise-identical
// results because ranks only exchange state at phase boundaries.
template <typename T>
class Cluster {
 public:
  Cluster(const PartitionSet& ps, const VertexMap& vm, const SplitForest& forest,
          DrpaAlgo algo, int delay, int num_layers, VertexId block_size = 0,
          SchedSpec sched = {1, 64}, bool threaded = false)
      : vm_(vm), forest_(forest), algo_(algo), delay_(delay), sched_(sched),
        threaded_(threaded), next_epoch_(num_layers, 0) {
    if (delay < 0) throw std::invalid_argument("Cluster: delay must be >= 0");
    // DRPA behaves like cd-0 when there is no delay.
    if (algo_ == DrpaAlgo::cdr && delay_ == 0) algo_ = DrpaAlgo::cd0;
    schedule_ = make_schedule(forest, algo_ == DrpaAlgo::cdr ? delay_ : 0);

    const int k = ps.num_partitions;
    ranks_.resize(k);
    for (int p = 0; p < k; ++p) {
      RankState<T>& rs = ranks_[p];
      rs.rank = p;
      const VertexId n_local = vm.range_hi[p] - vm.range_lo[p];
      auto local_edges = partition_local_edges(ps, vm, p);
      rs.graph = build_csr(local_edges, n_local);
      rs.graph_transposed = transpose(rs.graph);
      VertexId b = block_size > 0 ? block_size : std::max<VertexId>(n_local, 1);
      rs.plan = plan_blocks(rs.graph, b);
      rs.local_in_degree = in_degrees(rs.graph);
      rs.global_in_degree = rs.local_in_degree;
      rs.agg.resize(num_layers);
      rs.eff_degree.resize(num_layers);
    }
    // A split vertex's complete in-degree is the sum of its clones' local
    // in-degrees: every global edge lives in exactly one partition.
    for (const auto& tree : forest.trees) {
      std::int64_t total = 0;
      std::vector<std::pair<int, VertexId>> clones = clone_rows(tree);
      for (auto [p, row] : clones) total += ranks_[p].local_in_degree[row];
      for (auto [p, row] : clones) ranks_[p].global_in_degree[row] = total;
    }
    // Per-rank role tables, indexed by tree id.
    leaf_row_.assign(k, std::vector<VertexId>(forest.trees.size(), -1));
    root_row_.assign(k, std::vector<VertexId>(forest.trees.size(), -1));
    tree_root_rank_.resize(forest.trees.size());
    tree_leaf_ranks_.resize(forest.trees.size());
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      const auto& tree = forest.trees[t];
      const int rp = vm.partition_of(tree.root_local);
      tree_root_rank_[t] = rp;
      root_row_[rp][t] = tree.root_local - vm.range_lo[rp];
      for (VertexId leaf : tree.leaves_local) {
        int p = vm.partition_of(leaf);
        tree_leaf_ranks_[t].push_back(p);
        leaf_row_[p][t] = leaf - vm.range_lo[p];
      }
    }
  }

  int num_ranks() const { return static_cast<int>(ranks_.size()); }
  DrpaAlgo algo() const { return algo_; }
  const DrpaSchedule& schedule() const { return schedule_; }
  RankState<T>& rank_state(int p) { return ranks_[p]; }
  const RankState<T>& rank_state(int p) const { return ranks_[p]; }

  // Test knob: route() drops every message, leaving ranks fully isolated.
  void mute_transport(bool mute) { muted_ = mute; }

  // Local aggregation only; identical across the three algorithms. Rows
  // without local in-edges stay at the reduce identity internally.
  void local_aggregate(int p, int layer, const FeatureMatrix<T>& input,
                       const OperatorSpec& spec) {
    if (uses_edge_operand(spec.binary))
      throw std::invalid_argument("drpa aggregation supports vertex-operand specs only");
    RankState<T>& rs = ranks_[p];
    rs.agg[layer] = FeatureMatrix<T>(rs.graph.num_vertices(), input.dim(),
                                     reduce_identity<T>(spec.reduce));
    ap_blocked_into<T>(rs.plan, input, nullptr, spec, sched_, rs.agg[layer]);
    rs.eff_degree[layer] = rs.local_in_degree;
  }

  // One epoch of the distributed aggregate for one layer. inputs[p] holds
  // rank p's current feature rows (one per local vertex). Epochs per layer
  // must be processed in order.
  void run_epoch_aggregate(std::int64_t epoch, int layer, const OperatorSpec& spec,
                           const std::vector<FeatureMatrix<T>>& inputs) {
    if (epoch != next_epoch_[layer])
      throw std::invalid_argument("run_epoch_aggregate: epochs must be processed in order");
    next_epoch_[layer]++;

    run_phase([&](int p) { local_aggregate(p, layer, inputs[p], spec); });
    if (algo_ == DrpaAlgo::zero_comm) return;

    const bool delayed = algo_ == DrpaAlgo::cdr;
    const std::int64_t deliver = epoch + (delayed ? delay_ : 0);
    const std::vector<int>& bin =
        schedule_.bins[delayed ? static_cast<std::size_t>(epoch % delay_) : 0];

    run_phase([&](int p) { gather_leaves(p, bin, layer, epoch); });
    route(deliver);
    run_phase([&](int p) {
      auto due = take_due(p, layer, SyncChannel::aggregate, MsgKind::leaf_to_root, epoch);
      scatter_reduce_roots(p, layer, due, spec, epoch);
      if (!due.empty() || !delayed) gather_roots(p, bin_of_consumed(epoch, delayed), layer, epoch);
    });
    route(deliver);
    run_phase([&](int p) {
      auto due = take_due(p, layer, SyncChannel::aggregate, MsgKind::root_to_leaf, epoch);
      scatter_leaves(p, layer, due, epoch);
    });
  }

  // Readout with empty rows rewritten to zero. A row is empty when its
  // effective degree (local plus everything synced in) is zero.
  FeatureMatrix<T> aggregate_output(int p, int layer) const {
    const RankState<T>& rs = ranks_[p];
    FeatureMatrix<T> out = rs.agg[layer];
    for (VertexId v = 0; v < out.rows(); ++v)
      if (rs.eff_degree[layer][v] == 0)
        for (auto& x : out.row(v)) x = T{};
    return out;
  }

  // Tree synchronization of per-rank gradient rows: leaf partials sum into
  // the root, the summed row is broadcast back. Mirrors the forward exchange
  // over the same forest, with barrier delivery.
  void sync_gradients(std::int64_t epoch, int layer, std::vector<FeatureMatrix<T>>& grads) {
    std::vector<int> all_trees;
    all_trees.reserve(forest_.trees.size());
    for (std::size_t t = 0; t < forest_.trees.size(); ++t)
      all_trees.push_back(static_cast<int>(t));

    run_phase([&](int p) {
      emit_rows(p, all_trees, layer, epoch, SyncChannel::gradient, MsgKind::leaf_to_root,
                leaf_row_[p], grads[p], tree_root_rank_);
    });
    route(epoch);
    run_phase([&](int p) {
      auto due = take_due(p, layer, SyncChannel::gradient, MsgKind::leaf_to_root, epoch);
      for (const auto& msg : due)
        for (const auto& entry : msg.payload) {
          VertexId row = checked_root_row(p, entry.tree_id);
          auto dst = grads[p].row(row);
          for (std::int64_t j = 0; j < grads[p].dim(); ++j) dst[j] += entry.values[j];
        }
      emit_rows(p, all_trees, layer, epoch, SyncChannel::gradient, MsgKind::root_to_leaf,
                root_row_[p], grads[p], tree_leaf_ranks_);
    });
    route(epoch);
    run_phase([&](int p) {
      auto due = take_due(p, layer, SyncChannel::gradient, MsgKind::root_to_leaf, epoch);
      for (const auto& msg : due)
        for (const auto& entry : msg.payload) {
          VertexId row = checked_leaf_row(p, entry.tree_id);
          auto dst = grads[p].row(row);
          std::copy(entry.values.begin(), entry.values.end(), dst.begin());
        }
    });
  }

  // Every rank receives the rank-index-ordered sum of all contributions.
  static std::vector<std::vector<T>> allreduce(const std::vector<std::vector<T>>& per_rank) {
    if (per_rank.empty()) return {};
    const std::size_t len = per_rank[0].size();
    for (const auto& v : per_rank)
      if (v.size() != len) throw std::invalid_argument("allreduce: length mismatch");
    std::vector<T> sum(len, T{});
    for (const auto& v : per_rank)
      for (std::size_t i = 0; i < len; ++i) sum[i] += v[i];
    return std::vector<std::vector<T>>(per_rank.size(), sum);
  }

  std::vector<CommRecord> comm_report() const {
    std::vector<CommRecord> records;
    for (const auto& rs : ranks_) {
      for (const auto& [key, counts] : rs.volume) {
        CommRecord rec;
        rec.epoch = std::get<0>(key);
        rec.rank = rs.rank;
        rec.layer = std::get<1>(key);
        rec.kind = std::get<2>(key);
        rec.elements_sent = counts.first;
        rec.elements_received = counts.second;
        records.push_back(rec);
      }
    }
    std::sort(records.begin(), records.end(), [](const CommRecord& a, const CommRecord& b) {
      return std::tie(a.epoch, a.rank, a.layer, a.kind) <
             std::tie(b.epoch, b.rank, b.layer, b.kind);
    });
    return records;
  }

  std::vector<DeliveryTrace> delivery_trace() const {
    std::vector<DeliveryTrace> all;
    for (const auto& rs : ranks_) all.insert(all.end(), rs.trace.begin(), rs.trace.end());
    return all;
  }

  std::int64_t total_elements_sent() const {
    std::int64_t total = 0;
    for (const auto& rs : ranks_)
      for (const auto& [key, counts] : rs.volume) total += counts.first;
    return total;
  }

 private:
  // -- Phase driver ---------------------------------------------------------

  template <typename Fn>
  void run_phase(Fn&& fn) {
    const int k = num_ranks();
    if (!threaded_ || k == 1) {
      for (int p = 0; p < k; ++p) fn(p);
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (int p = 0; p < k; ++p) pool.emplace_back([&fn, p] { fn(p); });
    for (auto& t : pool) t.join();
  }

  // Moves every outbox message into its destination mailbox under
  // deliver_epoch. Runs between phases on the driver thread only.
  void route(std::int64_t deliver_epoch) {
    for (auto& src : ranks_) {
      for (auto& msg : src.outbox) {
        if (msg.dst_rank < 0 || msg.dst_rank >= num_ranks())
          throw std::out_of_range("alltoall: destination rank out of range");
        if (!muted_) {
          auto key = typename RankState<T>::MailKey{msg.layer, msg.channel, msg.kind};
          ranks_[msg.dst_rank].mailbox[key][deliver_epoch].push_back(std::move(msg));
        }
      }
      src.outbox.clear();
    }
  }

  std::vector<AggMessage<T>> take_due(int p, int layer, SyncChannel channel, MsgKind kind,
                                      std::int64_t epoch) {
    RankState<T>& rs = ranks_[p];
    auto key = typename RankState<T>::MailKey{layer, channel, kind};
    auto box = rs.mailbox.find(key);
    if (box == rs.mailbox.end()) return {};
    auto due = box->second.find(epoch);
    if (due == box->second.end()) return {};
    std::vector<AggMessage<T>> msgs = std::move(due->second);
    box->second.erase(due);
    // Deterministic drain order.
    std::sort(msgs.begin(), msgs.end(),
              [](const AggMessage<T>& a, const AggMessage<T>& b) {
                return a.src_rank < b.src_rank;
              });
    return msgs;
  }

  // -- Gather / scatter building blocks -------------------------------------

  // Collects rows this rank owns for the given trees and queues one message
  // per destination rank (ascending tree order inside each payload).
  void emit_rows(int p, const std::vector<int>& trees, int layer, std::int64_t epoch,
                 SyncChannel channel, MsgKind kind, const std::vector<VertexId>& my_rows,
                 const FeatureMatrix<T>& source, const auto& destinations) {
    RankState<T>& rs = ranks_[p];
    std::map<int, AggMessage<T>> per_dst;
    auto add_entry = [&](int dst, int tree_id, VertexId row) {
      auto& msg = per_dst[dst];
      if (msg.payload.empty()) {
        msg.src_rank = p;
        msg.dst_rank = dst;
        msg.kind = kind;
        msg.layer = layer;
        msg.channel = channel;
        msg.send_epoch = epoch;
      }
      typename AggMessage<T>::Entry entry;
      entry.tree_id = tree_id;
      entry.degree = channel == SyncChannel::aggregate ? rs.eff_degree[layer][row] : 0;
      auto src_row = source.row(row);
      entry.values.assign(src_row.begin(), src_row.end());
      msg.payload.push_back(std::move(entry));
    };
    for (int t : trees) {
      VertexId row = my_rows[t];
      if (row < 0) continue;
      if constexpr (std::is_same_v<std::decay_t<decltype(destinations[t])>, int>) {
        add_entry(destinations[t], t, row);
      } else {
        for (int dst : destinations[t]) add_entry(dst, t, row);
      }
    }
    for (auto& [dst, msg] : per_dst) {
      auto& counts = rs.volume[{epoch, layer, kind}];
      counts.first += static_cast<std::int64_t>(msg.payload.size()) * source.dim();
      rs.outbox.push_back(std::move(msg));
    }
  }

  // Pre-processing of leaf-to-root communication: each rank gathers the
  // current partial rows of the bin's leaf clones it owns.
  void gather_leaves(int p, const std::vector<int>& bin, int layer, std::int64_t epoch) {
    emit_rows(p, bin, layer, epoch, SyncChannel::aggregate, MsgKind::leaf_to_root,
              leaf_row_[p], ranks_[p].agg[layer], tree_root_rank_);
  }

  // Post-processing: received leaf partials reduce into the root clone's
  // current aggregate row; degrees accumulate alongside.
  void scatter_reduce_roots(int p, int layer, const std::vector<AggMessage<T>>& due,
                            const OperatorSpec& spec, std::int64_t epoch) {
    RankState<T>& rs = ranks_[p];
    for (const auto& msg : due) {
      auto& counts = rs.volume[{epoch, layer, MsgKind::leaf_to_root}];
      for (const auto& entry : msg.payload) {
        VertexId row = checked_root_row(p, entry.tree_id);
        auto dst = rs.agg[layer].row(row);
        for (std::int64_t j = 0; j < rs.agg[layer].dim(); ++j)
          dst[j] = apply_reduce(spec.reduce, dst[j], entry.values[j]);
        rs.eff_degree[layer][row] += entry.degree;
        counts.second += static_cast<std::int64_t>(entry.values.size());
        rs.trace.push_back({msg.send_epoch, epoch, msg.kind, layer, entry.tree_id});
      }
    }
  }

  // Pre-processing of root-to-leaf communication: roots of the bin broadcast
  // their (now synchronized) rows to every leaf.
  void gather_roots(int p, const std::vector<int>& bin, int layer, std::int64_t epoch) {
    emit_rows(p, bin, layer, epoch, SyncChannel::aggregate, MsgKind::root_to_leaf,
              root_row_[p], ranks_[p].agg[layer], tree_leaf_ranks_);
  }

  // Post-processing: final aggregates overwrite each leaf clone's row; no
  // reduction on this direction.
  void scatter_leaves(int p, int layer, const std::vector<AggMessage<T>>& due,
                      std::int64_t epoch) {
    RankState<T>& rs = ranks_[p];
    for (const auto& msg : due) {
      auto& counts = rs.volume[{epoch, layer, MsgKind::root_to_leaf}];
      for (const auto& entry : msg.payload) {
        VertexId row = checked_leaf_row(p, entry.tree_id);
        auto dst = rs.agg[layer].row(row);
        std::copy(entry.values.begin(), entry.values.end(), dst.begin());
        rs.eff_degree[layer][row] = entry.degree;
        counts.second += static_cast<std::int64_t>(entry.values.size());
        rs.trace.push_back({msg.send_epoch, epoch, msg.kind, layer, entry.tree_id});
      }
    }
  }

  VertexId checked_root_row(int p, int tree_id) const {
    if (tree_id < 0 || tree_id >= static_cast<int>(forest_.trees.size()) ||
        root_row_[p][tree_id] < 0)
      throw std::out_of_range("drpa: message routed to non-root for tree " +
                              std::to_string(tree_id));
    return root_row_[p][tree_id];
  }

  VertexId checked_leaf_row(int p, int tree_id) const {
    if (tree_id < 0 || tree_id >= static_cast<int>(forest_.trees.size()) ||
        leaf_row_[p][tree_id] < 0)
      throw std::out_of_range("drpa: message routed to non-leaf for tree " +
                              std::to_string(tree_id));
    return leaf_row_[p][tree_id];
  }

  std::vector<std::pair<int, VertexId>> clone_rows(const SplitForest::Tree& tree) const {
    std::vector<std::pair<int, VertexId>> out;
    int rp = vm_.partition_of(tree.root_local);
    out.emplace_back(rp, tree.root_local - vm_.range_lo[rp]);
    for (VertexId leaf : tree.leaves_local) {
      int p = vm_.partition_of(leaf);
      out.emplace_back(p, leaf - vm_.range_lo[p]);
    }
    return out;
  }

  const std::vector<int>& bin_of_consumed(std::int64_t epoch, bool delayed) const {
    if (!delayed) return schedule_.bins[0];
    // Messages consumed at epoch e were sent at e - r, which is the same bin
    // index because the bin cycle length is exactly r.
    return schedule_.bins[static_cast<std::size_t>(epoch % delay_)];
  }

  VertexMap vm_;
  SplitForest forest_;
  DrpaAlgo algo_;
  int delay_;
  SchedSpec sched_;
  bool threaded_;
  bool muted_ = false;
  DrpaSchedule schedule_;
  std::vector<RankState<T>> ranks_;
  std::vector<std::vector<VertexId>> leaf_row_;  // [rank][tree] -> local row or -1
  std::vector<std::vector<VertexId>> root_row_;
  std::vector<int> tree_root_rank_;
  std::vector<std::vector<int>> tree_leaf_ranks_;
  std::vector<std::int64_t> next_epoch_;  // per layer
};

// Stitches per-rank rows back into a |V| x d global matrix, taking each
// vertex's lowest-rank clone. With check_clones_equal, throws if any two
// clones disagree (the cd-0 consistency property).
template <typename T>
FeatureMatrix<T> assemble_global(const PartitionSet& ps, const VertexMap& vm,
                                 const std::vector<FeatureMatrix<T>>& per_rank,
                                 std::int64_t d, bool check_clones_equal = false) {
  FeatureMatrix<T> out(ps.num_vertices, d, T{});
  for (VertexId v = 0; v < ps.num_vertices; ++v) {
    if (ps.presence[v].empty()) continue;
    int first = ps.presence[v][0];
    VertexId row0 = vm.local_in(ps, first, v) - vm.range_lo[first];
    auto src = per_rank[first].row(row0);
    std::copy(src.begin(), src.end(), out.row(v).begin());
    if (check_clones_equal) {
      for (std::size_t i = 1; i < ps.presence[v].size(); ++i) {
        int p = ps.presence[v][i];
        VertexId row = vm.local_in(ps, p, v) - vm.range_lo[p];
        auto other = per_rank[p].row(row);
        for (std::int64_t j = 0; j < d; ++j)
          if (!(other[j] == src[j]))
            throw std::runtime_error("assemble_global: clones disagree at vertex " +
                                     std::to_string(v));
      }
    }
  }
  return out;
}

std::string comm_report_csv(const std::vector<CommRecord>& records);

}  // namespace aggforge
