// aggforge: synthetic graph generation, vertex-cut partitioning, aggregation
// kernel sweeps, full-batch training runs and work/memory estimates, with
// machine-readable CSV/JSON outputs.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aggforge/drpa.hpp"
#include "aggforge/estimators.hpp"
#include "aggforge/gen.hpp"
#include "aggforge/io.hpp"
#include "aggforge/partition.hpp"
#include "aggforge/sage.hpp"
#include "aggforge/traffic_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aggforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitVerification = 3;

class Timer {
 public:
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Config-file value unless the flag was given on the command line (flags win).
template <typename T>
void config_override(const CLI::App& app, const json& config, const std::string& flag,
                     const std::string& key, T& value) {
  if (app.count(flag) > 0) return;
  if (config.contains(key)) value = config.at(key).get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  return json::parse(read_text_file(path));
}

std::vector<VertexId> parse_id_list(const std::string& csv) {
  std::vector<VertexId> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  return out;
}

int run_gen(const std::string& config_path, const CLI::App& app, std::string kind,
            std::int64_t n, double p, int m, std::string blocks_csv, double p_in,
            double p_out, bool duplicate, std::int64_t feat_dim, int classes,
            std::uint64_t seed, std::string out_dir) {
  Timer timer;
  json config = load_config(config_path);
  config_override(app, config, "--kind", "kind", kind);
  config_override(app, config, "--n", "n", n);
  config_override(app, config, "--p", "p", p);
  config_override(app, config, "--m", "m", m);
  config_override(app, config, "--blocks", "blocks", blocks_csv);
  config_override(app, config, "--p-in", "p_in", p_in);
  config_override(app, config, "--p-out", "p_out", p_out);
  config_override(app, config, "--duplicate", "duplicate", duplicate);
  config_override(app, config, "--feat-dim", "feat_dim", feat_dim);
  config_override(app, config, "--classes", "classes", classes);
  config_override(app, config, "--seed", "seed", seed);
  config_override(app, config, "--out", "out", out_dir);

  GenSpec spec;
  spec.seed = seed;
  spec.duplicate_directed = duplicate;
  spec.num_vertices = n;
  if (kind == "erdos_renyi" || kind == "er") {
    spec.kind = GraphKind::erdos_renyi;
    spec.edge_prob = p;
  } else if (kind == "barabasi_albert" || kind == "ba") {
    spec.kind = GraphKind::barabasi_albert;
    spec.attach_count = m;
  } else if (kind == "sbm") {
    spec.kind = GraphKind::sbm;
    for (VertexId b : parse_id_list(blocks_csv)) spec.block_sizes.push_back(b);
    spec.p_in = p_in;
    spec.p_out = p_out;
  } else {
    std::cerr << "gen: unknown kind '" << kind << "'\n";
    return kExitUsage;
  }

  GeneratedGraph g = generate(spec);
  fs::create_directories(out_dir);
  fs::path dir(out_dir);
  write_edge_list(dir / "edges.txt", g.edges);
  write_features(dir / "features.bin", gen_features(g.num_vertices, feat_dim, seed));
  std::vector<int> labels =
      g.labels.empty() ? gen_labels(g.num_vertices, classes, seed) : g.labels;
  write_labels(dir / "labels.txt", labels);

  json snapshot = {{"kind", kind},     {"n", g.num_vertices}, {"p", p},
                   {"m", m},           {"blocks", blocks_csv}, {"p_in", p_in},
                   {"p_out", p_out},   {"duplicate", duplicate}, {"feat_dim", feat_dim},
                   {"classes", classes}, {"seed", seed},      {"edges", g.edges.size()}};
  RunManifest manifest{"gen", snapshot.dump(), {},
                       {dir / "edges.txt", dir / "features.bin", dir / "labels.txt"},
                       timer.elapsed_ms()};
  write_manifest(dir / "manifest.json", manifest);
  std::cout << "gen: " << g.num_vertices << " vertices, " << g.edges.size() << " edges -> "
            << out_dir << "\n";
  return kExitOk;
}

int run_partition(const std::string& config_path, const CLI::App& app, std::string graph_path,
                  std::int64_t vertices, int k, double slack, std::uint64_t seed,
                  std::string out_dir) {
  Timer timer;
  json config = load_config(config_path);
  config_override(app, config, "--graph", "graph", graph_path);
  config_override(app, config, "--vertices", "vertices", vertices);
  config_override(app, config, "--k", "k", k);
  config_override(app, config, "--slack", "slack", slack);
  config_override(app, config, "--seed", "seed", seed);
  config_override(app, config, "--out", "out", out_dir);

  if (!fs::exists(graph_path)) {
    std::cerr << "partition: no such file: " << graph_path << "\n";
    return kExitUsage;
  }
  auto edges = read_edge_list(graph_path);
  VertexId n = vertices > 0 ? vertices : infer_num_vertices(edges);

  PartitionSet ps = libra_partition(edges, n, k, slack);
  VertexMap vm = build_vertex_map(ps);
  SplitForest forest = build_split_trees(vm, seed);
  PartitionStats stats = partition_stats(ps);

  fs::path dir(out_dir);
  write_partition_dir(dir, ps, vm, forest, seed);
  write_text_file(dir / "stats.json", stats.to_json());

  json snapshot = {{"graph", graph_path}, {"vertices", n}, {"k", k},
                   {"slack", slack},      {"seed", seed},  {"out", out_dir}};
  std::vector<fs::path> outputs = {dir / "meta.json", dir / "stats.json"};
  for (int p = 0; p < k; ++p) {
    outputs.push_back(dir / ("part-" + std::to_string(p)) / "edges.txt");
    outputs.push_back(dir / ("part-" + std::to_string(p)) / "l2g.txt");
  }
  RunManifest manifest{"partition", snapshot.dump(), {fs::path(graph_path)}, outputs,
                       timer.elapsed_ms()};
  write_manifest(dir / "manifest.json", manifest);
  std::cout << "partition: k=" << k << " rf=" << stats.rf << " balance=" << stats.balance
            << " -> " << out_dir << "\n";
  return kExitOk;
}

template <typename T>
int aggregate_with(const CsrGraph& graph, const FeatureMatrix<T>& fv, OperatorSpec spec,
                   const std::vector<VertexId>& sizes, std::int64_t cache_bytes,
                   SchedSpec sched, bool baseline, bool check, const fs::path& dir) {
  FeatureMatrix<T> fe;
  const FeatureMatrix<T>* fe_ptr = nullptr;
  if (uses_edge_operand(spec.binary)) {
    fe = FeatureMatrix<T>(graph.num_edges(), fv.dim(), T{1});
    fe_ptr = &fe;
  }

  auto rows = sweep_blocks(graph, fv, spec, sizes, cache_bytes, sched);
  std::string csv = sweep_csv(rows);

  FeatureMatrix<T> reference;
  if (baseline || check) {
    auto t0 = std::chrono::steady_clock::now();
    reference = ap_reference(graph, fv, fe_ptr, spec);
    auto t1 = std::chrono::steady_clock::now();
    if (baseline) {
      // Reference row: n_B = 0 marks the unblocked oracle run.
      TrafficReport model = estimate_traffic(
          plan_blocks(graph, std::max<VertexId>(graph.num_vertices(), 1)), fv.dim(),
          sizeof(T), cache_bytes, fe_ptr != nullptr);
      std::ostringstream os;
      os << 0 << ',' << model.bytes_read_fv << ',' << model.bytes_rw_fo << ','
         << model.bytes_read_fe << ',' << model.total_io << ',' << model.reuse_fv << ','
         << std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count() << '\n';
      csv += os.str();
    }
  }
  write_text_file(dir / "sweep.csv", csv);

  if (check) {
    for (VertexId b : sizes) {
      auto out = ap_blocked(plan_blocks(graph, b), fv, fe_ptr, spec, sched);
      if (!(out == reference)) {
        std::cerr << "aggregate: blocked output (B=" << b << ") differs from reference\n";
        return kExitVerification;
      }
    }
    std::cout << "aggregate: check ok, output hash "
              << content_hash(ap_blocked(plan_blocks(graph, sizes[0]), fv, fe_ptr, spec, sched))
              << "\n";
  }
  return kExitOk;
}

int run_aggregate(const std::string& config_path, const CLI::App& app, std::string graph_path,
                  std::string features_path, std::int64_t feat_dim, std::string binary,
                  std::string reduce, std::string sizes_csv, std::int64_t cache_bytes,
                  int workers, VertexId chunk, bool baseline, bool check,
                  std::uint64_t seed, std::string out_dir) {
  Timer timer;
  json config = load_config(config_path);
  config_override(app, config, "--graph", "graph", graph_path);
  config_override(app, config, "--features", "features", features_path);
  config_override(app, config, "--feat-dim", "feat_dim", feat_dim);
  config_override(app, config, "--binary", "binary", binary);
  config_override(app, config, "--reduce", "reduce", reduce);
  config_override(app, config, "--block-sizes", "block_sizes", sizes_csv);
  config_override(app, config, "--cache-bytes", "cache_bytes", cache_bytes);
  config_override(app, config, "--workers", "workers", workers);
  config_override(app, config, "--chunk", "chunk", chunk);
  config_override(app, config, "--seed", "seed", seed);
  config_override(app, config, "--out", "out", out_dir);

  if (!fs::exists(graph_path)) {
    std::cerr << "aggregate: no such file: " << graph_path << "\n";
    return kExitUsage;
  }
  auto edges = read_edge_list(graph_path);
  CsrGraph graph = build_csr(edges, infer_num_vertices(edges));
  OperatorSpec spec{parse_binary_op(binary), parse_reduce_op(reduce)};
  std::vector<VertexId> sizes;
  if (!sizes_csv.empty()) sizes = parse_id_list(sizes_csv);
  std::int64_t elem = 8;
  if (!features_path.empty() && read_feature_dtype(features_path) == "f32") elem = 4;
  std::int64_t dim = feat_dim;
  if (!features_path.empty()) {
    auto sidecar = nlohmann::json::parse(read_text_file(features_path + ".json"));
    dim = sidecar.at("cols").get<std::int64_t>();
  }
  if (sizes.empty())
    sizes = {default_block_size(graph.num_vertices(), dim, elem, cache_bytes)};
  SchedSpec sched{workers > 0 ? workers : default_workers(), chunk};
  fs::path dir(out_dir);
  fs::create_directories(dir);

  int rc;
  std::vector<fs::path> inputs = {fs::path(graph_path)};
  if (!features_path.empty()) {
    inputs.push_back(fs::path(features_path));
    std::string dtype = read_feature_dtype(features_path);
    if (dtype == "f32")
      rc = aggregate_with(graph, read_features<float>(features_path), spec, sizes,
                          cache_bytes, sched, baseline, check, dir);
    else if (dtype == "f64")
      rc = aggregate_with(graph, read_features<double>(features_path), spec, sizes,
                          cache_bytes, sched, baseline, check, dir);
    else
      rc = aggregate_with(graph, read_features<std::int64_t>(features_path), spec, sizes,
                          cache_bytes, sched, baseline, check, dir);
  } else {
    rc = aggregate_with(graph, gen_features(graph.num_vertices(), feat_dim, seed), spec,
                        sizes, cache_bytes, sched, baseline, check, dir);
  }
  if (rc != kExitOk) return rc;

  json snapshot = {{"graph", graph_path},   {"features", features_path},
                   {"feat_dim", feat_dim},  {"binary", binary},
                   {"reduce", reduce},      {"block_sizes", sizes_csv},
                   {"cache_bytes", cache_bytes}, {"workers", sched.workers},
                   {"chunk", chunk},        {"seed", seed}};
  RunManifest manifest{"aggregate", snapshot.dump(), inputs, {dir / "sweep.csv"},
                       timer.elapsed_ms()};
  write_manifest(dir / "manifest.json", manifest);
  return kExitOk;
}

int run_train(const std::string& config_path, const CLI::App& app, std::string graph_path,
              std::string features_path, std::string labels_path, std::string algo_name,
              int k, int r, double lr, double wd, int epochs, std::uint64_t seed,
              std::int64_t h1, std::int64_t h2, std::string out_dir) {
  Timer timer;
  json config = load_config(config_path);
  config_override(app, config, "--graph", "graph", graph_path);
  config_override(app, config, "--features", "features", features_path);
  config_override(app, config, "--labels", "labels", labels_path);
  config_override(app, config, "--algo", "algo", algo_name);
  config_override(app, config, "--k", "k", k);
  config_override(app, config, "--r", "r", r);
  config_override(app, config, "--lr", "lr", lr);
  config_override(app, config, "--wd", "wd", wd);
  config_override(app, config, "--epochs", "epochs", epochs);
  config_override(app, config, "--seed", "seed", seed);
  config_override(app, config, "--h1", "h1", h1);
  config_override(app, config, "--h2", "h2", h2);
  config_override(app, config, "--out", "out", out_dir);

  for (const auto& path : {graph_path, features_path, labels_path}) {
    if (!fs::exists(path)) {
      std::cerr << "train: no such file: " << path << "\n";
      return kExitUsage;
    }
  }

  TrainConfig tc;
  try {
    tc.algo = parse_train_algo(algo_name);
  } catch (const std::exception& e) {
    std::cerr << "train: " << e.what() << "\n";
    return kExitUsage;
  }
  tc.k = k;
  tc.r = r;
  tc.lr = lr;
  tc.wd = wd;
  tc.epochs = epochs;
  tc.seed = seed;
  tc.h1 = h1;
  tc.h2 = h2;
  if (tc.algo != TrainAlgo::single && tc.k < 1) {
    std::cerr << "train: distributed algorithms need --k >= 1\n";
    return kExitUsage;
  }
  if (tc.algo == TrainAlgo::cdr && tc.r < 0) {
    std::cerr << "train: cd-r needs --r >= 0\n";
    return kExitUsage;
  }

  auto edges = read_edge_list(graph_path);
  auto features = read_features<double>(features_path);
  auto labels = read_labels(labels_path);
  CsrGraph graph = build_csr(edges, features.rows());

  TrainResult result = train(tc, graph, features, labels);

  fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text_file(dir / "metrics.csv", metrics_csv(result.metrics));
  save_checkpoint((dir / "checkpoint.bin").string(), result.model);
  std::vector<fs::path> outputs = {dir / "metrics.csv", dir / "checkpoint.bin"};
  if (!result.comm_log_csv.empty()) {
    write_text_file(dir / "comm_log.csv", result.comm_log_csv);
    outputs.push_back(dir / "comm_log.csv");
  }

  // Epoch-time windows: delayed algorithms only reach steady state after the
  // pipeline fills, so early and late windows are reported separately.
  auto window_avg = [&](int lo, int hi) {
    double sum = 0.0;
    int count = 0;
    for (const auto& m : result.metrics)
      if (m.epoch >= lo && m.epoch < hi) {
        sum += m.wall_ms;
        ++count;
      }
    return count == 0 ? 0.0 : sum / count;
  };
  double avg_1_10 = window_avg(1, 10);
  double avg_10_20 = window_avg(10, 20);
  std::cout << "train: " << epochs << " epochs, final loss "
            << (result.metrics.empty() ? 0.0 : result.metrics.back().loss)
            << ", avg epoch ms [1,10)=" << avg_1_10 << " [10,20)=" << avg_10_20 << "\n";

  json snapshot = {{"graph", graph_path}, {"features", features_path},
                   {"labels", labels_path}, {"algo", algo_name},
                   {"k", k},             {"r", r},
                   {"lr", lr},           {"wd", wd},
                   {"epochs", epochs},   {"seed", seed},
                   {"h1", h1},           {"h2", h2},
                   {"avg_epoch_ms_1_10", avg_1_10},
                   {"avg_epoch_ms_10_20", avg_10_20}};
  RunManifest manifest{"train", snapshot.dump(),
                       {fs::path(graph_path), fs::path(features_path), fs::path(labels_path)},
                       outputs, timer.elapsed_ms()};
  write_manifest(dir / "manifest.json", manifest);
  return kExitOk;
}

int run_estimate(const std::string& config_path, const CLI::App& app, std::string work_spec,
                 std::string memory_spec, std::string out_dir) {
  Timer timer;
  json config = load_config(config_path);
  config_override(app, config, "--work", "work", work_spec);
  config_override(app, config, "--memory", "memory", memory_spec);
  config_override(app, config, "--out", "out", out_dir);

  json out = json::object();
  if (!work_spec.empty()) {
    // hops as "n,deg,feat;n,deg,feat;..."
    std::vector<HopSpec> hops;
    std::stringstream ss(work_spec);
    std::string hop;
    while (std::getline(ss, hop, ';')) {
      std::stringstream hs(hop);
      std::string field;
      HopSpec h;
      if (!std::getline(hs, field, ',')) break;
      h.num_vertices = std::stod(field);
      if (!std::getline(hs, field, ',')) throw std::invalid_argument("bad hop spec: " + hop);
      h.avg_degree = std::stod(field);
      if (!std::getline(hs, field, ',')) throw std::invalid_argument("bad hop spec: " + hop);
      h.feat_dim = std::stod(field);
      hops.push_back(h);
    }
    out["work"] = json::parse(estimate_work(hops).to_json());
  }
  if (!memory_spec.empty()) {
    // "N,f,h1,h2,l"
    auto dims = parse_id_list(memory_spec);
    if (dims.size() != 5) throw std::invalid_argument("memory spec needs N,f,h1,h2,l");
    out["memory"] =
        json::parse(estimate_memory(dims[0], dims[1], dims[2], dims[3], dims[4]).to_json());
  }
  if (out.empty()) {
    std::cerr << "estimate: give --work and/or --memory\n";
    return kExitUsage;
  }
  std::cout << out.dump(2) << "\n";

  fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text_file(dir / "estimate.json", out.dump(2));
  json snapshot = {{"work", work_spec}, {"memory", memory_spec}};
  RunManifest manifest{"estimate", snapshot.dump(), {}, {dir / "estimate.json"},
                       timer.elapsed_ms()};
  write_manifest(dir / "manifest.json", manifest);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph aggregation and distributed full-batch training workbench"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic graph with features and labels");
  std::string gen_config, gen_kind = "erdos_renyi", gen_blocks = "100,100";
  std::int64_t gen_n = 100, gen_feat_dim = 8;
  double gen_p = 0.05, gen_p_in = 0.1, gen_p_out = 0.01;
  int gen_m = 2, gen_classes = 2;
  bool gen_duplicate = false;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "gen_out";
  gen->add_option("--config", gen_config, "JSON config file (flags override)");
  gen->add_option("--kind", gen_kind, "erdos_renyi|barabasi_albert|sbm");
  gen->add_option("--n", gen_n, "vertex count (er/ba)");
  gen->add_option("--p", gen_p, "edge probability (er)");
  gen->add_option("--m", gen_m, "attachments per vertex (ba)");
  gen->add_option("--blocks", gen_blocks, "comma-separated block sizes (sbm)");
  gen->add_option("--p-in", gen_p_in, "intra-block probability (sbm)");
  gen->add_option("--p-out", gen_p_out, "inter-block probability (sbm)");
  gen->add_flag("--duplicate", gen_duplicate, "emit each undirected edge as two directed edges");
  gen->add_option("--feat-dim", gen_feat_dim, "feature width");
  gen->add_option("--classes", gen_classes, "label classes when no ground truth");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output directory");

  // partition
  auto* part = app.add_subcommand("partition", "vertex-cut partition an edge list");
  std::string part_config, part_graph, part_out = "partition_out";
  std::int64_t part_vertices = 0;
  int part_k = 2;
  double part_slack = 1.1;
  std::uint64_t part_seed = 0;
  part->add_option("--config", part_config, "JSON config file (flags override)");
  part->add_option("--graph", part_graph, "edge-list file");
  part->add_option("--vertices", part_vertices, "vertex count (default: max id + 1)");
  part->add_option("--k", part_k, "partition count");
  part->add_option("--slack", part_slack, "capacity slack factor");
  part->add_option("--seed", part_seed, "split-tree root seed");
  part->add_option("--out", part_out, "output directory");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "blocked aggregation sweep over block sizes");
  std::string agg_config, agg_graph, agg_features, agg_binary = "copylhs",
              agg_reduce = "sum", agg_sizes, agg_out = "aggregate_out";
  std::int64_t agg_feat_dim = 8, agg_cache = 1 << 20;
  int agg_workers = 0;
  VertexId agg_chunk = 64;
  bool agg_baseline = false, agg_check = false;
  std::uint64_t agg_seed = 0;
  agg->add_option("--config", agg_config, "JSON config file (flags override)");
  agg->add_option("--graph", agg_graph, "edge-list file");
  agg->add_option("--features", agg_features, "feature file (defaults to seeded random)");
  agg->add_option("--feat-dim", agg_feat_dim, "random feature width when no file given");
  agg->add_option("--binary", agg_binary, "add|sub|mul|div|copylhs|copyrhs");
  agg->add_option("--reduce", agg_reduce, "sum|max|min");
  agg->add_option("--block-sizes", agg_sizes, "comma-separated source block sizes");
  agg->add_option("--cache-bytes", agg_cache, "cache size for the traffic model");
  agg->add_option("--workers", agg_workers, "worker threads (0 = AGGFORGE_WORKERS/auto)");
  agg->add_option("--chunk", agg_chunk, "destination chunk size");
  agg->add_flag("--baseline", agg_baseline, "append an unblocked reference row (n_B=0)");
  agg->add_flag("--check", agg_check, "verify blocked outputs against the reference");
  agg->add_option("--seed", agg_seed, "random feature seed");
  agg->add_option("--out", agg_out, "output directory");

  // train
  auto* trn = app.add_subcommand("train", "full-batch GraphSAGE training");
  std::string trn_config, trn_graph, trn_features, trn_labels, trn_algo = "single",
              trn_out = "train_out";
  int trn_k = 1, trn_r = 0, trn_epochs = 10;
  double trn_lr = 0.05, trn_wd = 5e-4;
  std::uint64_t trn_seed = 0;
  std::int64_t trn_h1 = 16, trn_h2 = 16;
  trn->add_option("--config", trn_config, "JSON config file (flags override)");
  trn->add_option("--graph", trn_graph, "edge-list file");
  trn->add_option("--features", trn_features, "feature file (f64)");
  trn->add_option("--labels", trn_labels, "label file");
  trn->add_option("--algo", trn_algo, "single|0c|cd-0|cd-r");
  trn->add_option("--k", trn_k, "partition count");
  trn->add_option("--r", trn_r, "cd-r delay in epochs");
  trn->add_option("--lr", trn_lr, "learning rate");
  trn->add_option("--wd", trn_wd, "weight decay");
  trn->add_option("--epochs", trn_epochs, "epoch count");
  trn->add_option("--seed", trn_seed, "init/partition seed");
  trn->add_option("--h1", trn_h1, "first hidden width");
  trn->add_option("--h2", trn_h2, "second hidden width");
  trn->add_option("--out", trn_out, "output directory");

  // estimate
  auto* est = app.add_subcommand("estimate", "aggregation work / model memory estimates");
  std::string est_config, est_work, est_memory, est_out = "estimate_out";
  est->add_option("--config", est_config, "JSON config file (flags override)");
  est->add_option("--work", est_work, "hops as 'n,deg,feat;n,deg,feat;...'");
  est->add_option("--memory", est_memory, "'N,f,h1,h2,l'");
  est->add_option("--out", est_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return run_gen(gen_config, *gen, gen_kind, gen_n, gen_p, gen_m, gen_blocks, gen_p_in,
                     gen_p_out, gen_duplicate, gen_feat_dim, gen_classes, gen_seed, gen_out);
    if (part->parsed())
      return run_partition(part_config, *part, part_graph, part_vertices, part_k, part_slack,
                           part_seed, part_out);
    if (agg->parsed())
      return run_aggregate(agg_config, *agg, agg_graph, agg_features, agg_feat_dim,
                           agg_binary, agg_reduce, agg_sizes, agg_cache, agg_workers,
                           agg_chunk, agg_baseline, agg_check, agg_seed, agg_out);
    if (trn->parsed())
      return run_train(trn_config, *trn, trn_graph, trn_features, trn_labels, trn_algo,
                       trn_k, trn_r, trn_lr, trn_wd, trn_epochs, trn_seed, trn_h1, trn_h2,
                       trn_out);
    if (est->parsed()) return run_estimate(est_config, *est, est_work, est_memory, est_out);
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
