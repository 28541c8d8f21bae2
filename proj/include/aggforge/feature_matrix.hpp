#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace aggforge {

// Dense row-major rows x d matrix. Element type is one of f32, f64 or an
// exact integer; equivalence suites run on integers so reassociation noise
// cannot mask logic bugs, training runs on f64.
template <typename T>
class FeatureMatrix {
 public:
  using value_type = T;

  FeatureMatrix() : rows_(0), d_(0) {}
  FeatureMatrix(std::int64_t rows, std::int64_t d, T fill = T{})
      : rows_(rows), d_(d), data_(static_cast<std::size_t>(rows * d), fill) {}
  FeatureMatrix(std::int64_t rows, std::int64_t d, std::vector<T> data)
      : rows_(rows), d_(d), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(rows_ * d_))
      throw std::invalid_argument("FeatureMatrix: data length != rows*d");
  }

  std::int64_t rows() const { return rows_; }
  std::int64_t dim() const { return d_; }

  std::span<T> row(std::int64_t i) { return {data_.data() + i * d_, static_cast<std::size_t>(d_)}; }
  std::span<const T> row(std::int64_t i) const {
    return {data_.data() + i * d_, static_cast<std::size_t>(d_)};
  }

  T& at(std::int64_t i, std::int64_t j) { return data_[i * d_ + j]; }
  const T& at(std::int64_t i, std::int64_t j) const { return data_[i * d_ + j]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  void fill(T v) { data_.assign(data_.size(), v); }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::int64_t rows_;
  std::int64_t d_;
  std::vector<T> data_;
};

// FNV-1a over the raw element bytes; used by determinism checks and the CLI.
template <typename T>
std::uint64_t content_hash(const FeatureMatrix<T>& m) {
  const auto* p = reinterpret_cast<const unsigned char*>(m.data().data());
  std::size_t n = m.data().size() * sizeof(T);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace aggforge
