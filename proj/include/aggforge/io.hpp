#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aggforge/csr.hpp"
#include "aggforge/feature_matrix.hpp"
#include "aggforge/partition.hpp"

namespace aggforge {

// Edge-list text: one "src dst" decimal pair per line, LF-terminated,
// '#'-prefixed comment lines ignored.
void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges);
std::vector<Edge> read_edge_list(const std::filesystem::path& path);
VertexId infer_num_vertices(std::span<const Edge> edges);

// Feature matrix: raw little-endian element array at <path>, JSON sidecar at
// <path>.json with {"rows":R,"cols":D,"dtype":"f32"|"f64"|"i64"}.
template <typename T>
void write_features(const std::filesystem::path& path, const FeatureMatrix<T>& m);
template <typename T>
FeatureMatrix<T> read_features(const std::filesystem::path& path);
std::string read_feature_dtype(const std::filesystem::path& path);

// Labels: one integer per line, row index = vertex id, -1 = unlabeled.
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::filesystem::path& path);

// Partition directory: part-<p>/edges.txt (local-ID edge list),
// part-<p>/l2g.txt (local->global table), meta.json with ranges, stats and
// the split forest.
void write_partition_dir(const std::filesystem::path& dir, const PartitionSet& ps,
                         const VertexMap& vm, const SplitForest& forest,
                         std::uint64_t seed);

std::uint64_t fnv1a_file(const std::filesystem::path& path);

// Every CLI run writes exactly one of these next to its outputs.
struct RunManifest {
  std::string command;
  std::string config_json;  // serialized config snapshot
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::int64_t wall_ms = 0;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace aggforge
