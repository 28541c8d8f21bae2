#include "aggforge/drpa.hpp"

#include <sstream>

namespace aggforge {

std::string to_string(DrpaAlgo algo) {
  switch (algo) {
    case DrpaAlgo::zero_comm: return "0c";
    case DrpaAlgo::cd0: return "cd-0";
    case DrpaAlgo::cdr: return "cd-r";
  }
  return "?";
}

DrpaAlgo parse_drpa_algo(const std::string& name) {
  if (name == "0c") return DrpaAlgo::zero_comm;
  if (name == "cd-0") return DrpaAlgo::cd0;
  if (name == "cd-r") return DrpaAlgo::cdr;
  throw std::invalid_argument("unknown algorithm: " + name);
}

DrpaSchedule make_schedule(const SplitForest& forest, int delay) {
  if (delay < 0) throw std::invalid_argument("make_schedule: delay must be >= 0");
  const int n_trees = static_cast<int>(forest.trees.size());
  DrpaSchedule sched;
  sched.delay = delay;
  if (delay == 0) {
    sched.bins.emplace_back();
    for (int t = 0; t < n_trees; ++t) sched.bins[0].push_back(t);
    return sched;
  }
  const int per_bin = n_trees / delay;
  sched.bins.resize(delay);
  for (int i = 0; i < delay; ++i)
    for (int t = i * per_bin; t < (i + 1) * per_bin; ++t) sched.bins[i].push_back(t);
  for (int t = delay * per_bin; t < n_trees; ++t) sched.bins[delay - 1].push_back(t);
  return sched;
}

std::string comm_report_csv(const std::vector<CommRecord>& records) {
  std::ostringstream os;
  os << "epoch,rank,layer,kind,elements_sent,elements_received\n";
  for (const auto& r : records) {
    os << r.epoch << ',' << r.rank << ',' << r.layer << ',' << to_string(r.kind) << ','
       << r.elements_sent << ',' << r.elements_received << '\n';
  }
  return os.str();
}

}  // namespace aggforge
