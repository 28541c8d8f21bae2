#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aggforge/blocked_kernel.hpp"
#include "aggforge/drpa.hpp"

namespace aggforge {

struct SageDims {
  std::int64_t f = 0;   // input feature width
  std::int64_t h1 = 0;  // first hidden width
  std::int64_t h2 = 0;  // second hidden width
  std::int64_t l = 0;   // label classes
};

// Three-layer GraphSAGE with the GCN aggregation operator: per layer, sum
// aggregation, add the vertex's own features, normalize by in-degree + 1,
// then a dense layer; ReLU after the first two layers.
struct SageModel {
  SageDims dims;
  FeatureMatrix<double> w1;  // f  x h1
  FeatureMatrix<double> w2;  // h1 x h2
  FeatureMatrix<double> w3;  // h2 x l

  // Glorot-uniform init, deterministic per seed (and identical across ranks).
  static SageModel init(const SageDims& dims, std::uint64_t seed);

  FeatureMatrix<double>& weight(int layer);
  const FeatureMatrix<double>& weight(int layer) const;
};

struct SageGrads {
  FeatureMatrix<double> w1, w2, w3;
  FeatureMatrix<double>& weight(int layer);
};

// out = (agg + orig) / (deg + 1); deg = 0 leaves orig unchanged.
void gcn_normalize_row(std::span<const double> agg, std::span<const double> orig,
                       std::int64_t deg, std::span<double> out);

// Stored activations for one shard (whole graph single-process, one
// partition per rank otherwise); needed by backpropagation.
struct SageCaches {
  std::vector<FeatureMatrix<double>> h;     // h[0]=input .. h[3]=logits
  std::vector<FeatureMatrix<double>> agg;   // per layer, post readout
  std::vector<FeatureMatrix<double>> norm;  // per layer
  std::vector<FeatureMatrix<double>> z;     // per layer, pre-activation
  std::vector<std::vector<std::int64_t>> deg;  // normalization degrees per layer
  bool forward_done = false;
};

// Aggregation backend the layer math runs over: one shard stepped with
// ap_blocked, or the simulated cluster stepping all ranks per layer.
class SageEngine {
 public:
  virtual ~SageEngine() = default;
  virtual int shards() const = 0;
  virtual std::int64_t shard_rows(int shard) const = 0;
  // Complete (or algorithm-appropriate) aggregate of `in` for one layer,
  // plus the per-row degrees normalization should use.
  virtual void aggregate(std::int64_t epoch, int layer,
                         const std::vector<FeatureMatrix<double>>& in,
                         std::vector<FeatureMatrix<double>>& agg_out,
                         std::vector<std::vector<std::int64_t>>& deg_out) = 0;
  // Cross-clone synchronization of per-row gradient contributions; identity
  // for the single-process and communication-avoiding paths.
  virtual void sync_gradient(std::int64_t epoch, int layer,
                             std::vector<FeatureMatrix<double>>& grads) = 0;
  virtual const CsrGraph& transposed_graph(int shard) const = 0;
  virtual std::int64_t elements_sent() const = 0;
};

class SingleEngine : public SageEngine {
 public:
  SingleEngine(const CsrGraph& g, VertexId block_size = 0, SchedSpec sched = {1, 64});
  int shards() const override { return 1; }
  std::int64_t shard_rows(int) const override { return graph_.num_vertices(); }
  void aggregate(std::int64_t, int, const std::vector<FeatureMatrix<double>>& in,
                 std::vector<FeatureMatrix<double>>& agg_out,
                 std::vector<std::vector<std::int64_t>>& deg_out) override;
  void sync_gradient(std::int64_t, int, std::vector<FeatureMatrix<double>>&) override {}
  const CsrGraph& transposed_graph(int) const override { return transposed_; }
  std::int64_t elements_sent() const override { return 0; }

 private:
  CsrGraph graph_;
  CsrGraph transposed_;
  BlockPlan plan_;
  std::vector<std::int64_t> degrees_;
  SchedSpec sched_;
};

// Runs the drpa cluster; gradient sync happens only under cd-0 (cd-r keeps
// gradient flow local, parameters still allreduce every epoch).
class DistributedEngine : public SageEngine {
 public:
  DistributedEngine(const PartitionSet& ps, const VertexMap& vm, const SplitForest& forest,
                    DrpaAlgo algo, int delay, VertexId block_size = 0,
                    SchedSpec sched = {1, 64}, bool threaded = false);
  int shards() const override { return cluster_.num_ranks(); }
  std::int64_t shard_rows(int shard) const override {
    return cluster_.rank_state(shard).graph.num_vertices();
  }
  void aggregate(std::int64_t epoch, int layer,
                 const std::vector<FeatureMatrix<double>>& in,
                 std::vector<FeatureMatrix<double>>& agg_out,
                 std::vector<std::vector<std::int64_t>>& deg_out) override;
  void sync_gradient(std::int64_t epoch, int layer,
                     std::vector<FeatureMatrix<double>>& grads) override;
  const CsrGraph& transposed_graph(int shard) const override {
    return cluster_.rank_state(shard).graph_transposed;
  }
  std::int64_t elements_sent() const override { return cluster_.total_elements_sent(); }
  Cluster<double>& cluster() { return cluster_; }

 private:
  Cluster<double> cluster_;
  DrpaAlgo algo_;
};

// Forward pass over all shards; caches are overwritten.
std::vector<FeatureMatrix<double>> sage_forward(const SageModel& model, SageEngine& engine,
                                                const std::vector<FeatureMatrix<double>>& features,
                                                std::vector<SageCaches>& caches,
                                                std::int64_t epoch = 0);

// Mean softmax cross-entropy over owned labeled rows. label < 0 marks an
// unlabeled row; owner_mask deduplicates clones. total_owned is the global
// labeled count the mean runs over. Returns this shard's loss share, the
// gradient w.r.t. logits (zero on non-owned rows) and the correct count.
struct LossResult {
  double loss = 0.0;
  FeatureMatrix<double> dlogits;
  std::int64_t correct = 0;
};
LossResult loss_grad(const FeatureMatrix<double>& logits, const std::vector<int>& labels,
                     const std::vector<char>& owner_mask, std::int64_t total_owned);

// Backpropagation over all shards; needs the caches from sage_forward.
// Parameter gradients come back summed over shards in rank order (the
// allreduce contract); feature_grads, when non-null, receives each shard's
// local input-feature gradient.
SageGrads sage_backward(const SageModel& model, SageEngine& engine,
                        std::vector<SageCaches>& caches,
                        const std::vector<FeatureMatrix<double>>& dlogits,
                        std::int64_t epoch = 0,
                        std::vector<FeatureMatrix<double>>* feature_grads = nullptr);

// w <- w - lr * (grad + wd * w)
void sgd_step(SageModel& model, const SageGrads& grads, double lr, double wd);

enum class TrainAlgo { single, zero_comm, cd0, cdr };

std::string to_string(TrainAlgo algo);
TrainAlgo parse_train_algo(const std::string& name);

struct TrainConfig {
  TrainAlgo algo = TrainAlgo::single;
  int k = 1;          // partitions; must be 1 for single
  int r = 0;          // cd-r delay
  double lr = 0.05;
  double wd = 5e-4;
  int epochs = 10;
  std::uint64_t seed = 0;
  std::int64_t h1 = 16;
  std::int64_t h2 = 16;
  double slack = 1.1;  // partitioner slack
  SchedSpec sched = {1, 64};
};

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  std::int64_t elements_sent = 0;  // cumulative delta for this epoch
  double wall_ms = 0.0;
};

struct TrainResult {
  SageModel model;
  std::vector<EpochMetrics> metrics;
  std::string comm_log_csv;  // drpa run log; empty for the single-process path
};

// Full-batch training loop: forward, loss, backward, gradient allreduce,
// SGD step; deterministic given the config seed.
TrainResult train(const TrainConfig& config, const CsrGraph& graph,
                  const FeatureMatrix<double>& features, const std::vector<int>& labels);

std::string metrics_csv(const std::vector<EpochMetrics>& metrics);

// Model checkpoint: one-line JSON header, then w1|w2|w3 as raw
// little-endian f64 blobs.
void save_checkpoint(const std::string& path, const SageModel& model);
SageModel load_checkpoint(const std::string& path);

}  // namespace aggforge
