#pragma once

#include <cstddef>

#include "dynppr/flat_map.hpp"
#include "dynppr/graph_store.hpp"

namespace dynppr {

// Estimate/residual pair for one source. The pair always satisfies
//   pi_s(u) = p_s(u) + sum_v r_s(v) * pi_v(u)
// on the graph it was last pushed against.
struct PprState {
  NodeId source = 0;
  SparseVector estimate;
  SparseVector residual;
  double epsilon_used = 0.0;

  // p = 0, r = 1_s.
  static PprState fresh(NodeId source);
};

enum class FrontierPolicy { kFifo, kPriority };

struct PushConfig {
  double alpha = 0.15;
  double epsilon = 1e-4;
  FrontierPolicy frontier = FrontierPolicy::kFifo;
  // Stop after this many pushes (0: run to the threshold). A stopped state
  // still satisfies the invariant, it just has larger residuals.
  std::size_t max_pushes = 0;
};

// Work performed by one or more push calls. volume is sum of d(u) over
// pushed nodes, the quantity the local-push run-time bounds are stated in.
struct PushStats {
  std::size_t pushes = 0;
  std::size_t negative_pushes = 0;
  double volume = 0.0;

  PushStats& operator+=(const PushStats& o) {
    pushes += o.pushes;
    negative_pushes += o.negative_pushes;
    volume += o.volume;
    return *this;
  }
};

// Throws Error(kInvalidArgument) unless alpha in (0,1] and epsilon > 0.
void validate(const PushConfig& cfg);

// Forward local push. Runs the positive-residual loop until no
// r(u) > eps*d(u), then the negative loop until no r(u) < -eps*d(u).
// Dangling nodes (d = 0) absorb their whole residual into the estimate.
PushStats forward_push(const Graph& g, PprState& state, const PushConfig& cfg);

}  // namespace dynppr
