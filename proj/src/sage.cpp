#include "aggforge/sage.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "aggforge/reference_kernel.hpp"
#include "aggforge/rng.hpp"

namespace aggforge {

namespace {

using Matrix = FeatureMatrix<double>;

constexpr OperatorSpec kModelSpec{BinaryOp::copy_lhs, ReduceOp::sum};

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.dim(), 0.0);
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (std::int64_t k = 0; k < a.dim(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::int64_t j = 0; j < b.dim(); ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

// a^T * b with a: n x k, b: n x m -> k x m
Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  Matrix c(a.dim(), b.dim(), 0.0);
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (std::int64_t k = 0; k < a.dim(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::int64_t j = 0; j < b.dim(); ++j) c.at(k, j) += aik * b.at(i, j);
    }
  }
  return c;
}

// a * b^T with a: n x m, b: k x m -> n x k
Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.rows(), 0.0);
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (std::int64_t k = 0; k < b.rows(); ++k) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < a.dim(); ++j) acc += a.at(i, j) * b.at(k, j);
      c.at(i, k) = acc;
    }
  }
  return c;
}

Matrix glorot(std::int64_t fan_in, std::int64_t fan_out, std::uint64_t seed) {
  Matrix w(fan_in, fan_out);
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Rng rng(seed);
  for (auto& x : w.data()) x = rng.next_real(-s, s);
  return w;
}

}  // namespace

SageModel SageModel::init(const SageDims& dims, std::uint64_t seed) {
  if (dims.f <= 0 || dims.h1 <= 0 || dims.h2 <= 0 || dims.l <= 0)
    throw std::invalid_argument("SageModel: dimensions must be positive");
  SageModel m;
  m.dims = dims;
  m.w1 = glorot(dims.f, dims.h1, mix_seed(seed, 1));
  m.w2 = glorot(dims.h1, dims.h2, mix_seed(seed, 2));
  m.w3 = glorot(dims.h2, dims.l, mix_seed(seed, 3));
  return m;
}

FeatureMatrix<double>& SageModel::weight(int layer) {
  return layer == 0 ? w1 : layer == 1 ? w2 : w3;
}
const FeatureMatrix<double>& SageModel::weight(int layer) const {
  return layer == 0 ? w1 : layer == 1 ? w2 : w3;
}
FeatureMatrix<double>& SageGrads::weight(int layer) {
  return layer == 0 ? w1 : layer == 1 ? w2 : w3;
}

void gcn_normalize_row(std::span<const double> agg, std::span<const double> orig,
                       std::int64_t deg, std::span<double> out) {
  const double inv = 1.0 / static_cast<double>(deg + 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (agg[j] + orig[j]) * inv;
}

SingleEngine::SingleEngine(const CsrGraph& g, VertexId block_size, SchedSpec sched)
    : graph_(g),
      transposed_(transpose(g)),
      plan_(plan_blocks(g, block_size > 0 ? block_size : std::max<VertexId>(g.num_vertices(), 1))),
      degrees_(in_degrees(g)),
      sched_(sched) {}

void SingleEngine::aggregate(std::int64_t, int, const std::vector<Matrix>& in,
                             std::vector<Matrix>& agg_out,
                             std::vector<std::vector<std::int64_t>>& deg_out) {
  agg_out[0] = ap_blocked<double>(plan_, in[0], nullptr, kModelSpec, sched_);
  deg_out[0] = degrees_;
}

DistributedEngine::DistributedEngine(const PartitionSet& ps, const VertexMap& vm,
                                     const SplitForest& forest, DrpaAlgo algo, int delay,
                                     VertexId block_size, SchedSpec sched, bool threaded)
    : cluster_(ps, vm, forest, algo, delay, /*num_layers=*/3, block_size, sched, threaded),
      algo_(cluster_.algo()) {}

void DistributedEngine::aggregate(std::int64_t epoch, int layer, const std::vector<Matrix>& in,
                                  std::vector<Matrix>& agg_out,
                                  std::vector<std::vector<std::int64_t>>& deg_out) {
  cluster_.run_epoch_aggregate(epoch, layer, kModelSpec, in);
  for (int p = 0; p < cluster_.num_ranks(); ++p) {
    agg_out[p] = cluster_.aggregate_output(p, layer);
    deg_out[p] = cluster_.rank_state(p).eff_degree[layer];
  }
}

void DistributedEngine::sync_gradient(std::int64_t epoch, int layer,
                                      std::vector<Matrix>& grads) {
  // Only the synchronous algorithm retraces the trees in backward; cd-r
  // keeps gradient flow local, 0c has no communication at all.
  if (algo_ == DrpaAlgo::cd0) cluster_.sync_gradients(epoch, layer, grads);
}

std::vector<Matrix> sage_forward(const SageModel& model, SageEngine& engine,
                                 const std::vector<Matrix>& features,
                                 std::vector<SageCaches>& caches, std::int64_t epoch) {
  const int shards = engine.shards();
  caches.assign(shards, SageCaches{});
  for (int s = 0; s < shards; ++s) {
    if (features[s].rows() != engine.shard_rows(s) || features[s].dim() != model.dims.f)
      throw std::invalid_argument("sage_forward: feature shape mismatch");
    caches[s].h.resize(4);
    caches[s].agg.resize(3);
    caches[s].norm.resize(3);
    caches[s].z.resize(3);
    caches[s].deg.resize(3);
    caches[s].h[0] = features[s];
  }

  std::vector<Matrix> inputs(shards), agg(shards);
  std::vector<std::vector<std::int64_t>> deg(shards);
  for (int layer = 0; layer < 3; ++layer) {
    for (int s = 0; s < shards; ++s) inputs[s] = caches[s].h[layer];
    engine.aggregate(epoch, layer, inputs, agg, deg);
    for (int s = 0; s < shards; ++s) {
      SageCaches& c = caches[s];
      const Matrix& h_in = c.h[layer];
      Matrix norm(h_in.rows(), h_in.dim());
      for (std::int64_t v = 0; v < h_in.rows(); ++v)
        gcn_normalize_row(agg[s].row(v), h_in.row(v), deg[s][v], norm.row(v));
      Matrix z = matmul(norm, model.weight(layer));
      Matrix h_out = z;
      if (layer < 2)
        for (auto& x : h_out.data()) x = x > 0.0 ? x : 0.0;
      c.agg[layer] = std::move(agg[s]);
      c.norm[layer] = std::move(norm);
      c.z[layer] = std::move(z);
      c.deg[layer] = std::move(deg[s]);
      c.h[layer + 1] = std::move(h_out);
    }
  }
  std::vector<Matrix> logits(shards);
  for (int s = 0; s < shards; ++s) {
    caches[s].forward_done = true;
    logits[s] = caches[s].h[3];
  }
  return logits;
}

LossResult loss_grad(const Matrix& logits, const std::vector<int>& labels,
                     const std::vector<char>& owner_mask, std::int64_t total_owned) {
  if (total_owned <= 0) throw std::invalid_argument("loss_grad: no labeled vertex");
  if (static_cast<std::int64_t>(labels.size()) != logits.rows() ||
      owner_mask.size() != labels.size())
    throw std::invalid_argument("loss_grad: label/mask shape mismatch");

  LossResult result;
  result.dlogits = Matrix(logits.rows(), logits.dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(total_owned);
  for (std::int64_t v = 0; v < logits.rows(); ++v) {
    if (!owner_mask[v] || labels[v] < 0) continue;
    const int y = labels[v];
    if (y >= logits.dim()) throw std::out_of_range("loss_grad: label out of range");
    auto row = logits.row(v);
    double max_logit = row[0];
    std::int64_t arg_max = 0;
    for (std::int64_t j = 1; j < logits.dim(); ++j)
      if (row[j] > max_logit) {
        max_logit = row[j];
        arg_max = j;
      }
    double denom = 0.0;
    for (std::int64_t j = 0; j < logits.dim(); ++j) denom += std::exp(row[j] - max_logit);
    result.loss += -(row[y] - max_logit - std::log(denom)) * inv;
    auto grad = result.dlogits.row(v);
    for (std::int64_t j = 0; j < logits.dim(); ++j)
      grad[j] = (std::exp(row[j] - max_logit) / denom - (j == y ? 1.0 : 0.0)) * inv;
    if (arg_max == y) result.correct++;
  }
  return result;
}

SageGrads sage_backward(const SageModel& model, SageEngine& engine,
                        std::vector<SageCaches>& caches, const std::vector<Matrix>& dlogits,
                        std::int64_t epoch, std::vector<Matrix>* feature_grads) {
  const int shards = engine.shards();
  SageGrads grads{Matrix(model.dims.f, model.dims.h1, 0.0),
                  Matrix(model.dims.h1, model.dims.h2, 0.0),
                  Matrix(model.dims.h2, model.dims.l, 0.0)};

  std::vector<Matrix> dh(shards);
  for (int s = 0; s < shards; ++s) {
    if (!caches[s].forward_done)
      throw std::logic_error("sage_backward: forward has not been run");
    dh[s] = dlogits[s];
  }

  std::vector<Matrix> g_rows(shards);
  for (int layer = 2; layer >= 0; --layer) {
    for (int s = 0; s < shards; ++s) {
      SageCaches& c = caches[s];
      Matrix dz = std::move(dh[s]);
      if (layer < 2) {
        for (std::int64_t i = 0; i < dz.rows(); ++i) {
          auto z_row = c.z[layer].row(i);
          auto dz_row = dz.row(i);
          for (std::int64_t j = 0; j < dz.dim(); ++j)
            if (z_row[j] <= 0.0) dz_row[j] = 0.0;
        }
      }
      // Parameter gradient sums over shards: each labeled vertex contributes
      // at exactly one clone, split-vertex terms split across ranks.
      Matrix dw = matmul_at_b(c.norm[layer], dz);
      auto& wsum = grads.weight(layer).data();
      for (std::size_t i = 0; i < wsum.size(); ++i) wsum[i] += dw.data()[i];

      Matrix dn = matmul_a_bt(dz, model.weight(layer));
      // The normalized row feeds both the aggregate and the vertex's own
      // features; both paths scale by 1/(deg+1).
      for (std::int64_t v = 0; v < dn.rows(); ++v) {
        const double inv = 1.0 / static_cast<double>(c.deg[layer][v] + 1);
        for (auto& x : dn.row(v)) x *= inv;
      }
      g_rows[s] = dn;
      dh[s] = std::move(dn);  // self path, local contribution
    }
    // Aggregate-path gradient needs every clone's contribution to the shared
    // complete aggregate before flowing through local edges.
    engine.sync_gradient(epoch, layer, g_rows);
    for (int s = 0; s < shards; ++s) {
      Matrix edge_grad =
          ap_reference_raw<double>(engine.transposed_graph(s), g_rows[s], nullptr, kModelSpec);
      auto& acc = dh[s].data();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += edge_grad.data()[i];
    }
  }
  if (feature_grads) *feature_grads = std::move(dh);
  return grads;
}

void sgd_step(SageModel& model, const SageGrads& grads, double lr, double wd) {
  for (int layer = 0; layer < 3; ++layer) {
    auto& w = model.weight(layer).data();
    const auto& g =
        (layer == 0 ? grads.w1 : layer == 1 ? grads.w2 : grads.w3).data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * (g[i] + wd * w[i]);
  }
}

std::string to_string(TrainAlgo algo) {
  switch (algo) {
    case TrainAlgo::single: return "single";
    case TrainAlgo::zero_comm: return "0c";
    case TrainAlgo::cd0: return "cd-0";
    case TrainAlgo::cdr: return "cd-r";
  }
  return "?";
}

TrainAlgo parse_train_algo(const std::string& name) {
  if (name == "single") return TrainAlgo::single;
  if (name == "0c") return TrainAlgo::zero_comm;
  if (name == "cd-0") return TrainAlgo::cd0;
  if (name == "cd-r") return TrainAlgo::cdr;
  throw std::invalid_argument("unknown training algorithm: " + name);
}

TrainResult train(const TrainConfig& config, const CsrGraph& graph,
                  const Matrix& features, const std::vector<int>& labels) {
  if (config.algo == TrainAlgo::single && config.k != 1)
    throw std::invalid_argument("train: algo=single requires k=1");
  if (config.algo != TrainAlgo::single && config.k < 1)
    throw std::invalid_argument("train: k must be >= 1");
  if (config.r < 0) throw std::invalid_argument("train: r must be >= 0");
  if (static_cast<std::int64_t>(labels.size()) != graph.num_vertices())
    throw std::invalid_argument("train: one label per vertex required (-1 = unlabeled)");

  int num_classes = 0;
  for (int l : labels) num_classes = std::max(num_classes, l + 1);
  if (num_classes == 0) throw std::invalid_argument("train: no labeled vertex");

  SageDims dims{features.dim(), config.h1, config.h2, num_classes};
  SageModel model = SageModel::init(dims, config.seed);

  // Shard setup: feature/label slices and the loss-owner mask (a labeled
  // vertex is owned by its lowest-rank clone).
  std::unique_ptr<SageEngine> engine;
  std::vector<Matrix> shard_features;
  std::vector<std::vector<int>> shard_labels;
  std::vector<std::vector<char>> shard_owner;
  std::int64_t total_owned = 0;

  PartitionSet ps;
  VertexMap vm;
  SplitForest forest;
  if (config.algo == TrainAlgo::single) {
    engine = std::make_unique<SingleEngine>(graph, 0, config.sched);
    shard_features = {features};
    std::vector<char> owner(labels.size(), 0);
    for (std::size_t v = 0; v < labels.size(); ++v)
      if (labels[v] >= 0) {
        owner[v] = 1;
        ++total_owned;
      }
    shard_labels = {labels};
    shard_owner = {std::move(owner)};
  } else {
    auto edges = graph.edges();
    ps = libra_partition(edges, graph.num_vertices(), config.k, config.slack);
    vm = build_vertex_map(ps);
    forest = build_split_trees(vm, config.seed);
    DrpaAlgo algo = config.algo == TrainAlgo::zero_comm ? DrpaAlgo::zero_comm
                    : config.algo == TrainAlgo::cd0     ? DrpaAlgo::cd0
                                                        : DrpaAlgo::cdr;
    engine = std::make_unique<DistributedEngine>(ps, vm, forest, algo, config.r, 0,
                                                 config.sched);
    shard_features.resize(config.k);
    shard_labels.resize(config.k);
    shard_owner.resize(config.k);
    for (int p = 0; p < config.k; ++p) {
      const auto& l2g = vm.local_to_global[p];
      Matrix local(static_cast<std::int64_t>(l2g.size()), features.dim());
      std::vector<int> local_labels(l2g.size());
      std::vector<char> owner(l2g.size(), 0);
      for (std::size_t i = 0; i < l2g.size(); ++i) {
        auto src = features.row(l2g[i]);
        std::copy(src.begin(), src.end(), local.row(static_cast<std::int64_t>(i)).begin());
        local_labels[i] = labels[l2g[i]];
        if (local_labels[i] >= 0 && ps.presence[l2g[i]][0] == p) owner[i] = 1;
      }
      shard_features[p] = std::move(local);
      shard_labels[p] = std::move(local_labels);
      shard_owner[p] = std::move(owner);
    }
    for (VertexId v = 0; v < ps.num_vertices; ++v)
      if (labels[v] >= 0 && !ps.presence[v].empty()) ++total_owned;
  }

  TrainResult result{std::move(model), {}, {}};
  std::vector<SageCaches> caches;
  std::int64_t sent_before = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    auto logits = sage_forward(result.model, *engine, shard_features, caches, epoch);

    double loss = 0.0;
    std::int64_t correct = 0;
    std::vector<Matrix> dlogits(engine->shards());
    for (int s = 0; s < engine->shards(); ++s) {
      LossResult shard = loss_grad(logits[s], shard_labels[s], shard_owner[s], total_owned);
      loss += shard.loss;
      correct += shard.correct;
      dlogits[s] = std::move(shard.dlogits);
    }

    SageGrads grads = sage_backward(result.model, *engine, caches, dlogits, epoch);
    sgd_step(result.model, grads, config.lr, config.wd);

    auto t1 = std::chrono::steady_clock::now();
    EpochMetrics m;
    m.epoch = epoch;
    m.loss = loss;
    m.train_acc = static_cast<double>(correct) / static_cast<double>(total_owned);
    std::int64_t sent_now = engine->elements_sent();
    m.elements_sent = sent_now - sent_before;
    sent_before = sent_now;
    m.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.metrics.push_back(m);
  }
  if (auto* dist = dynamic_cast<DistributedEngine*>(engine.get()))
    result.comm_log_csv = comm_report_csv(dist->cluster().comm_report());
  return result;
}

std::string metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,loss,train_acc,elements_sent\n";
  for (const auto& m : metrics)
    os << m.epoch << ',' << m.loss << ',' << m.train_acc << ',' << m.elements_sent << '\n';
  return os.str();
}

void save_checkpoint(const std::string& path, const SageModel& model) {
  nlohmann::json header = {{"f", model.dims.f},
                           {"h1", model.dims.h1},
                           {"h2", model.dims.h2},
                           {"l", model.dims.l},
                           {"dtype", "f64"}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header.dump() << '\n';
  for (int layer = 0; layer < 3; ++layer) {
    const auto& w = model.weight(layer).data();
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
  }
}

SageModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header_line;
  std::getline(in, header_line);
  auto header = nlohmann::json::parse(header_line);
  SageDims dims{header.at("f").get<std::int64_t>(), header.at("h1").get<std::int64_t>(),
                header.at("h2").get<std::int64_t>(), header.at("l").get<std::int64_t>()};
  SageModel model;
  model.dims = dims;
  model.w1 = Matrix(dims.f, dims.h1);
  model.w2 = Matrix(dims.h1, dims.h2);
  model.w3 = Matrix(dims.h2, dims.l);
  for (int layer = 0; layer < 3; ++layer) {
    auto& w = model.weight(layer).data();
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(w.size() * sizeof(double)))
      throw std::runtime_error(path + ": truncated checkpoint");
  }
  return model;
}

}  // namespace aggforge
