#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dynppr/flat_map.hpp"
#include "dynppr/graph_store.hpp"

namespace dynppr::testing {

// Erdos-Renyi G(n, p), unit weights.
inline Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  EventBatch batch;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) batch.push_back(EdgeEvent::insert(u, v));
    }
  }
  Graph g;
  g.ensure_nodes(n);
  g.apply_events(batch);
  return g;
}

inline Graph from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  EventBatch batch;
  for (auto [u, v] : edges) batch.push_back(EdgeEvent::insert(u, v));
  Graph g;
  g.ensure_nodes(n);
  g.apply_events(batch);
  return g;
}

inline Graph path2() { return from_edges(2, {{0, 1}}); }
inline Graph triangle() { return from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline double l1_gap(const SparseVector& p, const std::vector<double>& dense) {
  double s = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) s += std::abs(p.get(static_cast<NodeId>(i)) - dense[i]);
  return s;
}

inline double linf_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace dynppr::testing
