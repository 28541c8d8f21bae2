#include "aggforge/io.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "raw feature files are little-endian");

namespace aggforge {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

template <typename T>
constexpr const char* dtype_name() {
  if constexpr (std::is_same_v<T, float>) return "f32";
  if constexpr (std::is_same_v<T, double>) return "f64";
  if constexpr (std::is_same_v<T, std::int64_t>) return "i64";
}

}  // namespace

void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges) {
  auto out = open_out(path);
  for (const auto& e : edges) out << e.src << ' ' << e.dst << '\n';
}

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Edge e;
    if (!(ls >> e.src >> e.dst))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed edge line");
    edges.push_back(e);
  }
  return edges;
}

VertexId infer_num_vertices(std::span<const Edge> edges) {
  VertexId n = 0;
  for (const auto& e : edges) n = std::max({n, e.src + 1, e.dst + 1});
  return n;
}

template <typename T>
void write_features(const std::filesystem::path& path, const FeatureMatrix<T>& m) {
  auto out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(T)));
  nlohmann::json sidecar = {{"rows", m.rows()}, {"cols", m.dim()}, {"dtype", dtype_name<T>()}};
  write_text_file(path.string() + ".json", sidecar.dump());
}

std::string read_feature_dtype(const std::filesystem::path& path) {
  auto sidecar = nlohmann::json::parse(read_text_file(path.string() + ".json"));
  return sidecar.at("dtype").get<std::string>();
}

template <typename T>
FeatureMatrix<T> read_features(const std::filesystem::path& path) {
  auto sidecar = nlohmann::json::parse(read_text_file(path.string() + ".json"));
  const std::int64_t rows = sidecar.at("rows").get<std::int64_t>();
  const std::int64_t cols = sidecar.at("cols").get<std::int64_t>();
  if (sidecar.at("dtype").get<std::string>() != dtype_name<T>())
    throw std::runtime_error(path.string() + ": dtype mismatch, expected " +
                             std::string(dtype_name<T>()));
  std::vector<T> data(static_cast<std::size_t>(rows * cols));
  auto in = open_in(path, std::ios::binary);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(T)));
  if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(T)))
    throw std::runtime_error(path.string() + ": truncated feature file");
  return FeatureMatrix<T>(rows, cols, std::move(data));
}

template void write_features<float>(const std::filesystem::path&, const FeatureMatrix<float>&);
template void write_features<double>(const std::filesystem::path&, const FeatureMatrix<double>&);
template void write_features<std::int64_t>(const std::filesystem::path&,
                                           const FeatureMatrix<std::int64_t>&);
template FeatureMatrix<float> read_features<float>(const std::filesystem::path&);
template FeatureMatrix<double> read_features<double>(const std::filesystem::path&);
template FeatureMatrix<std::int64_t> read_features<std::int64_t>(const std::filesystem::path&);

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  for (int l : labels) out << l << '\n';
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  int l;
  while (in >> l) labels.push_back(l);
  return labels;
}

void write_partition_dir(const std::filesystem::path& dir, const PartitionSet& ps,
                         const VertexMap& vm, const SplitForest& forest,
                         std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int p = 0; p < ps.num_partitions; ++p) {
    auto part_dir = dir / ("part-" + std::to_string(p));
    std::filesystem::create_directories(part_dir);
    write_edge_list(part_dir / "edges.txt", partition_local_edges(ps, vm, p));
    auto l2g = open_out(part_dir / "l2g.txt");
    for (VertexId g : vm.local_to_global[p]) l2g << g << '\n';
  }

  nlohmann::json meta;
  meta["k"] = ps.num_partitions;
  meta["slack"] = ps.slack;
  meta["seed"] = seed;
  meta["ranges"] = nlohmann::json::array();
  for (std::size_t p = 0; p < vm.range_lo.size(); ++p)
    meta["ranges"].push_back({vm.range_lo[p], vm.range_hi[p]});
  PartitionStats stats = partition_stats(ps);
  meta["rf"] = stats.rf;
  meta["balance"] = stats.balance;
  meta["split_trees"] = nlohmann::json::array();
  for (const auto& tree : forest.trees) {
    meta["split_trees"].push_back({{"global_id", tree.global_id},
                                   {"root_local", tree.root_local},
                                   {"leaves_local", tree.leaves_local}});
  }
  write_text_file(dir / "meta.json", meta.dump(2));
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config"] = nlohmann::json::parse(manifest.config_json.empty() ? "{}"
                                                                   : manifest.config_json);
  j["inputs"] = nlohmann::json::array();
  for (const auto& p : manifest.inputs)
    j["inputs"].push_back({{"path", p.string()}, {"fnv1a", fnv1a_file(p)}});
  j["outputs"] = nlohmann::json::array();
  for (const auto& p : manifest.outputs) j["outputs"].push_back(p.string());
  j["wall_ms"] = manifest.wall_ms;
  write_text_file(path, j.dump(2));
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace aggforge
