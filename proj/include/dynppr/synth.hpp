#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dynppr/graph_store.hpp"

namespace dynppr {

enum class Generator { kErdosRenyiGrowth, kPreferentialAttachment, kShockInjection };

struct ShockSpec {
  // kInvalidNode picks a random node that is active from the first batch,
  // has edges, and has enough non-neighbors to realize the shock.
  NodeId node = kInvalidNode;
  // 0 selects batches / 2.
  std::size_t batch = 0;
  // Degree of the shocked node after the shock batch is round(factor * before).
  double factor = 3.0;
  // Fraction of the node's existing edges deleted in the shock batch.
  double rewire_fraction = 0.5;
};

struct StreamSpec {
  Generator generator = Generator::kErdosRenyiGrowth;
  std::size_t nodes = 100;  // node budget
  std::size_t batches = 10;
  std::size_t batch_size = 50;
  double deletion_fraction = 0.0;  // in [0, 1)
  std::uint64_t seed = 0;
  ShockSpec shock;
};

struct GeneratedStream {
  // Every event of batch t carries timestamp t.
  std::vector<EventBatch> batches;
  std::optional<NodeId> shocked_node;
  std::size_t shock_batch = 0;
};

// Deterministic under spec.seed. Nodes become available linearly over the
// batches (node budget reached in the last one), front-loaded when early
// batches would otherwise be too dense to sample. Each batch inserts
// batch_size - floor(deletion_fraction * batch_size) edges, then deletes the
// rest from edges present at that point. Throws Error(kInfeasibleSpec) if a
// requested deletion or insertion cannot be realized.
GeneratedStream generate(const StreamSpec& spec);

}  // namespace dynppr
