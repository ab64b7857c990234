#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynppr/graph_store.hpp"
#include "dynppr/ppr_push.hpp"

namespace dynppr {

// What the global epsilon is divided by in adaptive mode.
//   kVolume:    sum of degrees. Residuals below eps_t * d(u) then sum to at
//               most epsilon, so ||p - pi||_1 <= epsilon holds.
//   kEdgeCount: number of undirected edges m_t. Half the work, but the same
//               argument only gives ||p - pi||_1 <= 2 epsilon.
enum class AdaptiveScale { kVolume, kEdgeCount };

struct DynPprConfig {
  double epsilon = 0.1;  // global precision, in (0, 2]
  double alpha = 0.15;
  // Push at epsilon / scale(G_t) each snapshot; otherwise at epsilon.
  bool adaptive = true;
  FrontierPolicy frontier = FrontierPolicy::kFifo;
  AdaptiveScale scale = AdaptiveScale::kVolume;
};

void validate(const DynPprConfig& cfg);

// Per-snapshot push precision: epsilon / scale(G_t) when adaptive (epsilon
// if the graph has no edges yet), epsilon otherwise.
double snapshot_epsilon(const DynPprConfig& cfg, const Graph& g);

// Adjusts (p, r) for one applied event so the push invariant holds on the
// graph after the event. Both directions of the undirected edge are handled:
// for endpoint x with new degree d and edge weight w,
//   insert: dp = p(x) * w / (d - w)    delete: dp = -p(x) * w / (d + w)
//   p(x) += dp;  r(x) -= dp / alpha;  r(y) += dp / alpha - dp.
// With unit weights this is exactly p/(d-1) and -p/(d+1) on the new degree.
void apply_event_to_state(PprState& state, const AppliedEvent& ev, double alpha);

// Single-event form that reads endpoint degrees from g_after. For a delete,
// ev.weight must carry the weight the removed edge had.
void apply_event_to_state(PprState& state, const Graph& g_after, const EdgeEvent& ev,
                          double alpha);

struct BatchWork {
  std::size_t snapshot = 0;
  std::size_t events = 0;
  double epsilon = 0.0;
  std::vector<PushStats> per_source;

  double total_volume() const;
};

// Applies the batch to g once, then for every state replays the per-event
// adjustments in order and re-pushes at snapshot_epsilon. Sources are
// processed in parallel (see worker_threads()).
BatchWork advance_snapshot(std::span<PprState> states, Graph& g,
                           std::span<const EdgeEvent> batch, const DynPprConfig& cfg);

// Replay + push for one state against an already-applied batch.
PushStats update_state(PprState& state, const Graph& g_after,
                       std::span<const AppliedEvent> applied, const DynPprConfig& cfg);

// Hardware concurrency, capped by DYNPPR_THREADS when set.
std::size_t worker_threads();

}  // namespace dynppr
