#include "aggforge/estimators.hpp"

#include <sstream>
#include <stdexcept>

namespace aggforge {

WorkEstimate estimate_work(const std::vector<HopSpec>& hops) {
  WorkEstimate est;
  for (const auto& hop : hops) {
    if (hop.num_vertices < 0 || hop.avg_degree < 0 || hop.feat_dim < 0)
      throw std::invalid_argument("estimate_work: negative input");
    double bops = hop.num_vertices * hop.avg_degree * hop.feat_dim / 1e9;
    est.per_hop_bops.push_back(bops);
    est.total_bops += bops;
  }
  return est;
}

std::string WorkEstimate::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"per_hop_bops\":[";
  for (std::size_t i = 0; i < per_hop_bops.size(); ++i)
    os << (i ? "," : "") << per_hop_bops[i];
  os << "],\"total_bops\":" << total_bops << "}";
  return os.str();
}

MemoryEstimate estimate_memory(std::int64_t n, std::int64_t f, std::int64_t h1,
                               std::int64_t h2, std::int64_t l) {
  if (n < 0 || f <= 0 || h1 <= 0 || h2 <= 0 || l <= 0)
    throw std::invalid_argument("estimate_memory: dimensions must be positive");
  MemoryEstimate est;
  est.weights = f * h1 + h1 * h2 + h2 * l;
  est.input = n * f;
  est.agg_outputs = n * (f + h1 + h2);
  est.mlp_outputs = n * (h1 + h2 + l);
  est.total = est.weights + est.input + est.agg_outputs + est.mlp_outputs;
  return est;
}

std::string MemoryEstimate::to_json() const {
  std::ostringstream os;
  os << "{\"weights\":" << weights << ",\"input\":" << input
     << ",\"agg_outputs\":" << agg_outputs << ",\"mlp_outputs\":" << mlp_outputs
     << ",\"total\":" << total << "}";
  return os.str();
}

}  // namespace aggforge
