#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aggforge/gen.hpp"
#include "aggforge/reference_kernel.hpp"
#include "aggforge/sage.hpp"
#include "test_support.hpp"

using namespace aggforge;

namespace {

const std::vector<Edge> kG3 = {{0, 2}, {1, 2}, {2, 0}};

using Matrix = FeatureMatrix<double>;

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.dim(), 0.0);
  for (std::int64_t i = 0; i < a.rows(); ++i)
    for (std::int64_t j = 0; j < b.dim(); ++j)
      for (std::int64_t k = 0; k < a.dim(); ++k) c.at(i, j) += a.at(i, k) * b.at(k, j);
  return c;
}

// Layer-by-layer hand evaluation against which sage_forward is checked.
Matrix oracle_forward(const SageModel& model, const CsrGraph& g, const Matrix& feats) {
  auto deg = in_degrees(g);
  Matrix h = feats;
  for (int layer = 0; layer < 3; ++layer) {
    Matrix agg = ap_reference(g, h, nullptr, {BinaryOp::copy_lhs, ReduceOp::sum});
    Matrix norm(h.rows(), h.dim());
    for (VertexId v = 0; v < h.rows(); ++v)
      for (std::int64_t j = 0; j < h.dim(); ++j)
        norm.at(v, j) = (agg.at(v, j) + h.at(v, j)) / static_cast<double>(deg[v] + 1);
    Matrix z = naive_matmul(norm, model.weight(layer));
    if (layer < 2)
      for (auto& x : z.data()) x = std::max(x, 0.0);
    h = std::move(z);
  }
  return h;
}

double loss_of(const SageModel& model, SageEngine& engine, const Matrix& feats,
               const std::vector<int>& labels, const std::vector<char>& owner,
               std::int64_t total) {
  std::vector<SageCaches> caches;
  auto logits = sage_forward(model, engine, {feats}, caches);
  return loss_grad(logits[0], labels, owner, total).loss;
}

}  // namespace

TEST_CASE("gcn_normalize_row examples") {
  double out[1];
  double agg4[] = {4.0}, orig2[] = {2.0};
  gcn_normalize_row(agg4, orig2, 1, out);
  CHECK(out[0] == 3.0);

  double agg0[] = {0.0}, orig5[] = {5.0};
  gcn_normalize_row(agg0, orig5, 0, out);
  CHECK(out[0] == 5.0);

  double aggz[] = {0.0}, origx[] = {0.7};
  gcn_normalize_row(aggz, origx, 3, out);
  CHECK(out[0] == doctest::Approx(0.7 / 4));
}

TEST_CASE("gcn_normalize_row is scale equivariant") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    double agg = rng.next_real(-5, 5), orig = rng.next_real(-5, 5);
    double c = rng.next_real(0.1, 4.0);
    std::int64_t deg = static_cast<std::int64_t>(rng.next_below(7));
    double base[1], scaled[1];
    double a1[] = {agg}, o1[] = {orig};
    gcn_normalize_row(a1, o1, deg, base);
    double a2[] = {agg * c}, o2[] = {orig * c};
    gcn_normalize_row(a2, o2, deg, scaled);
    CHECK(scaled[0] == doctest::Approx(c * base[0]).epsilon(1e-12));
  }
}

TEST_CASE("zero weights give zero logits") {
  CsrGraph g = build_csr(kG3, 3);
  SageModel model = SageModel::init({2, 3, 3, 2}, 1);
  model.w1.fill(0.0);
  model.w2.fill(0.0);
  model.w3.fill(0.0);
  SingleEngine engine(g);
  std::vector<SageCaches> caches;
  Matrix feats = gen_features(3, 2, 4);
  auto logits = sage_forward(model, engine, {feats}, caches);
  for (double x : logits[0].data()) CHECK(x == 0.0);
}

TEST_CASE("forward matches the layer-by-layer oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    VertexId n = 5 + static_cast<VertexId>(rng.next_below(30));
    auto edges = testing::random_edges(rng, n, 0.2);
    CsrGraph g = build_csr(edges, n);
    SageModel model = SageModel::init({3, 4, 3, 2}, rng.next_u64());
    Matrix feats = gen_features(n, 3, rng.next_u64());
    SingleEngine engine(g);
    std::vector<SageCaches> caches;
    auto logits = sage_forward(model, engine, {feats}, caches);
    Matrix want = oracle_forward(model, g, feats);
    for (std::size_t i = 0; i < want.data().size(); ++i)
      CHECK(logits[0].data()[i] ==
            doctest::Approx(want.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("loss on uniform logits is ln(classes)") {
  Matrix logits(4, 5, 0.37);
  std::vector<int> labels = {0, 3, 2, 4};
  std::vector<char> owner = {1, 1, 1, 1};
  auto result = loss_grad(logits, labels, owner, 4);
  CHECK(result.loss == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("huge-margin correct logits drive the loss to zero") {
  Matrix logits(2, 3, 0.0);
  logits.at(0, 1) = 50.0;
  logits.at(1, 0) = 50.0;
  std::vector<int> labels = {1, 0};
  std::vector<char> owner = {1, 1};
  auto result = loss_grad(logits, labels, owner, 2);
  CHECK(result.loss < 1e-12);
  CHECK(result.correct == 2);
}

TEST_CASE("loss gradient matches finite differences on a toy case") {
  Rng rng(11);
  Matrix logits(2, 3);
  for (auto& x : logits.data()) x = rng.next_real(-2, 2);
  std::vector<int> labels = {2, 0};
  std::vector<char> owner = {1, 1};
  auto result = loss_grad(logits, labels, owner, 2);
  const double eps = 1e-7;
  for (std::int64_t i = 0; i < 2; ++i) {
    for (std::int64_t j = 0; j < 3; ++j) {
      Matrix up = logits, down = logits;
      up.at(i, j) += eps;
      down.at(i, j) -= eps;
      double fd = (loss_grad(up, labels, owner, 2).loss -
                   loss_grad(down, labels, owner, 2).loss) /
                  (2 * eps);
      CHECK(result.dlogits.at(i, j) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("loss ignores non-owned and unlabeled rows and rejects empty sets") {
  Matrix logits(3, 2, 1.0);
  std::vector<int> labels = {0, -1, 1};
  std::vector<char> owner = {1, 1, 0};
  auto result = loss_grad(logits, labels, owner, 1);
  for (std::int64_t j = 0; j < 2; ++j) {
    CHECK(result.dlogits.at(1, j) == 0.0);
    CHECK(result.dlogits.at(2, j) == 0.0);
  }
  CHECK_THROWS_AS(loss_grad(logits, labels, owner, 0), std::invalid_argument);
}

TEST_CASE("full model gradient agrees with central finite differences") {
  Rng rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    VertexId n = 12;
    auto edges = testing::random_edges(rng, n, 0.25);
    CsrGraph g = build_csr(edges, n);
    SageModel model = SageModel::init({3, 4, 3, 2}, rng.next_u64());
    Matrix feats = gen_features(n, 3, rng.next_u64());
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.next_below(2));
    std::vector<char> owner(n, 1);
    SingleEngine engine(g);

    std::vector<SageCaches> caches;
    auto logits = sage_forward(model, engine, {feats}, caches);
    auto lr = loss_grad(logits[0], labels, owner, n);
    std::vector<Matrix> feature_grads;
    SageGrads grads = sage_backward(model, engine, caches, {lr.dlogits}, 0, &feature_grads);

    const double eps = 1e-5;
    double worst = 0.0;
    auto check_block = [&](Matrix& param, const Matrix& grad) {
      for (std::size_t i = 0; i < param.data().size(); ++i) {
        double keep = param.data()[i];
        param.data()[i] = keep + eps;
        double up = loss_of(model, engine, feats, labels, owner, n);
        param.data()[i] = keep - eps;
        double down = loss_of(model, engine, feats, labels, owner, n);
        param.data()[i] = keep;
        double fd = (up - down) / (2 * eps);
        double rel = std::abs(grad.data()[i] - fd) / std::max(1e-6, std::abs(fd));
        worst = std::max(worst, rel);
      }
    };
    check_block(model.w1, grads.w1);
    check_block(model.w2, grads.w2);
    check_block(model.w3, grads.w3);

    Matrix feats_var = feats;
    for (std::size_t i = 0; i < feats_var.data().size(); ++i) {
      double keep = feats_var.data()[i];
      feats_var.data()[i] = keep + eps;
      double up = loss_of(model, engine, feats_var, labels, owner, n);
      feats_var.data()[i] = keep - eps;
      double down = loss_of(model, engine, feats_var, labels, owner, n);
      feats_var.data()[i] = keep;
      double fd = (up - down) / (2 * eps);
      double rel = std::abs(feature_grads[0].data()[i] - fd) / std::max(1e-6, std::abs(fd));
      worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
  CsrGraph g = build_csr(kG3, 3);
  SageModel model = SageModel::init({2, 3, 3, 2}, 5);
  SingleEngine engine(g);
  std::vector<SageCaches> caches;
  Matrix feats = gen_features(3, 2, 6);
  sage_forward(model, engine, {feats}, caches);
  SageGrads grads = sage_backward(model, engine, caches, {Matrix(3, 2, 0.0)});
  for (double x : grads.w1.data()) CHECK(x == 0.0);
  for (double x : grads.w2.data()) CHECK(x == 0.0);
  for (double x : grads.w3.data()) CHECK(x == 0.0);
}

TEST_CASE("backward before forward is an error") {
  CsrGraph g = build_csr(kG3, 3);
  SageModel model = SageModel::init({2, 3, 3, 2}, 5);
  SingleEngine engine(g);
  std::vector<SageCaches> caches(1);
  CHECK_THROWS_AS(sage_backward(model, engine, caches, {Matrix(3, 2, 0.0)}),
                  std::logic_error);
}

TEST_CASE("cd-0 parameter gradients equal the single-process gradients") {
  Rng rng(17);
  VertexId n = 40;
  auto edges = testing::random_symmetric_edges(rng, n, 0.08);
  CsrGraph g = build_csr(edges, n);
  Matrix feats = gen_features(n, 3, 23);
  // isolated vertices join no partition, so they carry no loss in either run
  std::vector<int> labels(n, -1);
  std::int64_t total_labeled = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (g.in_degree(v) == 0) continue;
    labels[v] = static_cast<int>(rng.next_below(2));
    ++total_labeled;
  }
  SageModel model = SageModel::init({3, 4, 3, 2}, 31);

  // single-process gradients
  SingleEngine single(g);
  std::vector<SageCaches> caches;
  std::vector<char> owner(n, 0);
  for (VertexId v = 0; v < n; ++v) owner[v] = labels[v] >= 0 ? 1 : 0;
  auto logits = sage_forward(model, single, {feats}, caches);
  auto lr = loss_grad(logits[0], labels, owner, total_labeled);
  SageGrads want = sage_backward(model, single, caches, {lr.dlogits});

  for (int k : {2, 3}) {
    PartitionSet ps = libra_partition(edges, n, k);
    VertexMap vm = build_vertex_map(ps);
    SplitForest forest = build_split_trees(vm, 7);
    DistributedEngine dist(ps, vm, forest, DrpaAlgo::cd0, 0);

    std::vector<Matrix> shard_feats(k);
    std::vector<std::vector<int>> shard_labels(k);
    std::vector<std::vector<char>> shard_owner(k);
    for (int p = 0; p < k; ++p) {
      const auto& l2g = vm.local_to_global[p];
      shard_feats[p] = Matrix(static_cast<std::int64_t>(l2g.size()), 3);
      shard_labels[p].resize(l2g.size());
      shard_owner[p].assign(l2g.size(), 0);
      for (std::size_t i = 0; i < l2g.size(); ++i) {
        auto src = feats.row(l2g[i]);
        std::copy(src.begin(), src.end(),
                  shard_feats[p].row(static_cast<std::int64_t>(i)).begin());
        shard_labels[p][i] = labels[l2g[i]];
        shard_owner[p][i] = ps.presence[l2g[i]][0] == p ? 1 : 0;
      }
    }
    std::int64_t total = 0;
    for (VertexId v = 0; v < n; ++v)
      if (!ps.presence[v].empty() && labels[v] >= 0) ++total;
    REQUIRE(total == total_labeled);

    std::vector<SageCaches> dist_caches;
    auto dist_logits = sage_forward(model, dist, shard_feats, dist_caches);
    std::vector<Matrix> dlogits(k);
    double dist_loss = 0.0;
    for (int p = 0; p < k; ++p) {
      auto res = loss_grad(dist_logits[p], shard_labels[p], shard_owner[p], total);
      dist_loss += res.loss;
      dlogits[p] = std::move(res.dlogits);
    }
    CHECK(dist_loss == doctest::Approx(lr.loss).epsilon(1e-10));

    SageGrads got = sage_backward(model, dist, dist_caches, dlogits);
    for (int layer = 0; layer < 3; ++layer) {
      const auto& a = (layer == 0 ? want.w1 : layer == 1 ? want.w2 : want.w3).data();
      const auto& b = (layer == 0 ? got.w1 : layer == 1 ? got.w2 : got.w3).data();
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) <= 1e-10 * std::max(1.0, std::abs(a[i])));
    }
  }
}

TEST_CASE("sgd step behavior") {
  SageModel model = SageModel::init({2, 2, 2, 2}, 3);
  SageModel copy = model;
  SageGrads grads{Matrix(2, 2, 1.0), Matrix(2, 2, 1.0), Matrix(2, 2, 1.0)};

  sgd_step(copy, grads, 0.0, 0.5);
  CHECK(copy.w1.data() == model.w1.data());  // lr=0 freezes weights

  SageModel plain = model;
  sgd_step(plain, grads, 0.1, 0.0);
  for (std::size_t i = 0; i < plain.w1.data().size(); ++i)
    CHECK(plain.w1.data()[i] == doctest::Approx(model.w1.data()[i] - 0.1).epsilon(1e-15));

  SageModel a = model, b = model;
  sgd_step(a, grads, 0.05, 5e-4);
  sgd_step(b, grads, 0.05, 5e-4);
  CHECK(a.w1.data() == b.w1.data());
  CHECK(a.w3.data() == b.w3.data());
}

TEST_CASE("training on separable SBM decreases the loss") {
  auto g = gen_sbm({50, 50}, 0.1, 0.01, 5, true);
  CsrGraph graph = build_csr(g.edges, g.num_vertices);
  Matrix feats = gen_features(g.num_vertices, 4, 6);
  TrainConfig config;
  config.algo = TrainAlgo::single;
  config.epochs = 10;
  config.lr = 0.05;
  config.seed = 5;
  config.h1 = 8;
  config.h2 = 8;
  TrainResult result = train(config, graph, feats, g.labels);
  REQUIRE(result.metrics.size() == 10);
  for (std::size_t e = 1; e < result.metrics.size(); ++e)
    CHECK(result.metrics[e].loss < result.metrics[e - 1].loss);
  CHECK(result.metrics.back().elements_sent == 0);
}

TEST_CASE("cd-0 training tracks the single-process loss trajectory") {
  auto g = gen_sbm({40, 40}, 0.12, 0.02, 9, true);
  CsrGraph graph = build_csr(g.edges, g.num_vertices);
  Matrix feats = gen_features(g.num_vertices, 4, 10);

  TrainConfig single;
  single.algo = TrainAlgo::single;
  single.epochs = 12;
  single.seed = 21;
  single.h1 = 6;
  single.h2 = 6;
  TrainResult want = train(single, graph, feats, g.labels);

  TrainConfig dist = single;
  dist.algo = TrainAlgo::cd0;
  dist.k = 2;
  TrainResult got = train(dist, graph, feats, g.labels);

  REQUIRE(want.metrics.size() == got.metrics.size());
  for (std::size_t e = 0; e < want.metrics.size(); ++e)
    CHECK(std::abs(want.metrics[e].loss - got.metrics[e].loss) <=
          1e-8 * std::max(1.0, std::abs(want.metrics[e].loss)));
}

TEST_CASE("0c training reports zero communication, cd-r delays it") {
  auto g = gen_sbm({30, 30}, 0.15, 0.02, 3, true);
  CsrGraph graph = build_csr(g.edges, g.num_vertices);
  Matrix feats = gen_features(g.num_vertices, 3, 4);

  TrainConfig zc;
  zc.algo = TrainAlgo::zero_comm;
  zc.k = 2;
  zc.epochs = 6;
  zc.h1 = 4;
  zc.h2 = 4;
  TrainResult res = train(zc, graph, feats, g.labels);
  for (const auto& m : res.metrics) CHECK(m.elements_sent == 0);

  TrainConfig cdr = zc;
  cdr.algo = TrainAlgo::cdr;
  cdr.r = 5;
  cdr.epochs = 8;
  TrainResult delayed = train(cdr, graph, feats, g.labels);
  for (const auto& m : delayed.metrics) CHECK(m.elements_sent > 0);  // sends start at once
}

TEST_CASE("relabeling vertices permutes the logits") {
  Rng rng(39);
  VertexId n = 25;
  auto edges = testing::random_edges(rng, n, 0.15);
  CsrGraph g = build_csr(edges, n);
  Matrix feats = gen_features(n, 3, 41);
  SageModel model = SageModel::init({3, 4, 4, 2}, 43);

  std::vector<VertexId> perm(n);
  for (VertexId v = 0; v < n; ++v) perm[v] = v;
  for (VertexId v = n - 1; v > 0; --v)
    std::swap(perm[v], perm[rng.next_below(static_cast<std::uint64_t>(v) + 1)]);

  std::vector<Edge> perm_edges;
  for (const auto& e : edges) perm_edges.push_back({perm[e.src], perm[e.dst]});
  CsrGraph pg = build_csr(perm_edges, n);
  Matrix perm_feats(n, 3);
  for (VertexId v = 0; v < n; ++v) {
    auto src = feats.row(v);
    std::copy(src.begin(), src.end(), perm_feats.row(perm[v]).begin());
  }

  SingleEngine eng(g), peng(pg);
  std::vector<SageCaches> c1, c2;
  auto logits = sage_forward(model, eng, {feats}, c1);
  auto plogits = sage_forward(model, peng, {perm_feats}, c2);
  for (VertexId v = 0; v < n; ++v)
    for (std::int64_t j = 0; j < 2; ++j)
      CHECK(plogits[0].at(perm[v], j) ==
            doctest::Approx(logits[0].at(v, j)).epsilon(1e-10));
}

TEST_CASE("metrics csv schema and checkpoint round trip") {
  auto g = gen_sbm({20, 20}, 0.2, 0.02, 3, true);
  CsrGraph graph = build_csr(g.edges, g.num_vertices);
  Matrix feats = gen_features(g.num_vertices, 3, 4);
  TrainConfig config;
  config.epochs = 2;
  config.h1 = 4;
  config.h2 = 4;
  TrainResult result = train(config, graph, feats, g.labels);

  std::string csv = metrics_csv(result.metrics);
  CHECK(csv.rfind("epoch,loss,train_acc,elements_sent\n", 0) == 0);

  save_checkpoint("sage_ckpt_test.bin", result.model);
  SageModel loaded = load_checkpoint("sage_ckpt_test.bin");
  CHECK(loaded.dims.f == result.model.dims.f);
  CHECK(loaded.w1.data() == result.model.w1.data());
  CHECK(loaded.w2.data() == result.model.w2.data());
  CHECK(loaded.w3.data() == result.model.w3.data());
  std::remove("sage_ckpt_test.bin");
}

TEST_CASE("train validates its configuration") {
  CsrGraph g = build_csr(kG3, 3);
  Matrix feats = gen_features(3, 2, 1);
  std::vector<int> labels = {0, 1, 0};
  TrainConfig config;
  config.algo = TrainAlgo::single;
  config.k = 2;
  CHECK_THROWS_AS(train(config, g, feats, labels), std::invalid_argument);
  config.k = 1;
  std::vector<int> none = {-1, -1, -1};
  CHECK_THROWS_AS(train(config, g, feats, none), std::invalid_argument);
}
