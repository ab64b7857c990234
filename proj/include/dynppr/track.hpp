#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dynppr/flat_map.hpp"
#include "dynppr/graph_store.hpp"

namespace dynppr {

// 1 - cos(a, b), in [0, 2]. Defined as 0 when both vectors are zero and 1
// when exactly one is.
double movement(std::span<const double> a, std::span<const double> b);

// (x - mean) / std with the population std over all entries. If the spread
// is zero every score is 0. Needs at least two entries.
std::map<NodeId, double> z_scores(const std::map<NodeId, double>& movements);

struct TrackedSample {
  NodeId node = 0;
  double degree = 0.0;
  std::vector<double> embedding;
};

struct ChangeRow {
  NodeId node = 0;
  double degree = 0.0;
  double degree_change = 0.0;
  double movement = 0.0;
  double z_score = 0.0;
};

struct ChangeReport {
  std::size_t snapshot = 0;
  // Sorted by z-score descending, then larger degree change, then node id.
  std::vector<ChangeRow> rows;
};

// Scores every node present in both snapshots. z-scores are computed over
// that whole set; afterwards, if min_degree_change > 0, rows with
// |degree_change| <= min_degree_change are dropped from the report.
ChangeReport build_change_report(std::size_t snapshot, std::span<const TrackedSample> previous,
                                 std::span<const TrackedSample> current,
                                 double min_degree_change = 0.0);

enum class CommuteInit { kUniform, kNormal };

// Degree-weighted moving-average baseline embedder. Each inserted edge (u, v)
// updates, in order,
//   w_u = d(u)/(d(u)+1) w_u + w_v / d(u)
//   w_v = d(v)/(d(v)+1) w_v + w_u / d(v)
// with post-insert degrees. Unseen nodes start from U(-0.5, 0.5)/dim or
// N(0, 0.1 I), drawn from a generator seeded by (seed, node).
class CommuteState {
 public:
  CommuteState(std::size_t dim, std::uint64_t seed, CommuteInit init = CommuteInit::kUniform);

  std::size_t dim() const noexcept { return dim_; }
  bool contains(NodeId v) const { return index_.contains(v); }
  // Null if the node has not been seen.
  const std::vector<double>* vector(NodeId v) const;
  void set_vector(NodeId v, std::vector<double> w);

  // Deletions are ignored.
  void step(const EdgeEvent& ev, double degree_u, double degree_v);

 private:
  std::vector<double>& ensure(NodeId v);
  std::vector<double> initial_vector(NodeId v) const;

  std::size_t dim_;
  std::uint64_t seed_;
  CommuteInit init_;
  FlatMap<std::size_t> index_;
  std::vector<std::vector<double>> vectors_;
};

// Reads post-insert degrees from g_after.
void commute_step(CommuteState& state, const EdgeEvent& ev, const Graph& g_after);

}  // namespace dynppr
