#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynppr/dyn_ppr.hpp"
#include "dynppr/graph_store.hpp"
#include "dynppr/hash_kernel.hpp"
#include "dynppr/ppr_push.hpp"

namespace dynppr {

struct Embedding {
  NodeId node = 0;
  std::size_t snapshot = 0;
  std::vector<double> values;
};

struct ProjectionStats {
  std::size_t touched = 0;
};

// w(h(i)) += sign(i) * max(log(p(i) * n_t), 0) over the support of p.
// Natural log; entries with p(i) * n_t <= 1 (including negative estimates)
// contribute nothing.
std::vector<double> hash_project(const SparseVector& p, std::size_t n_t,
                                 const HashKernel& kernel, ProjectionStats* stats = nullptr);

enum class PprSolver { kPush, kIsta };

struct TrackerConfig {
  std::vector<NodeId> subset;
  std::size_t dim = 512;
  std::uint64_t seed = 0;
  DynPprConfig ppr;
  PprSolver solver = PprSolver::kPush;
};

void validate(const TrackerConfig& cfg);

struct SnapshotResult {
  std::size_t snapshot = 0;
  // One per initialized source, ordered by node id.
  std::vector<Embedding> embeddings;
  BatchWork work;
  // Sources that received their first PPR vector in this snapshot.
  std::vector<NodeId> newly_initialized;
};

// Maintains PPR vectors and hash embeddings for a tracked subset of nodes
// over a stream of edge-event batches.
//
// initialize() builds the first snapshot and pushes every present source at
// precision 1/m_0. Each advance() applies one batch; sources already tracked
// get the per-event adjustments plus a push at snapshot_epsilon(); sources
// that appear for the first time start from p = 0, r = 1_s, are pushed at
// 1/m_t and then at snapshot_epsilon().
class DynamicPpe {
 public:
  explicit DynamicPpe(TrackerConfig cfg, Graph::Options graph_options = {});

  SnapshotResult initialize(std::span<const EdgeEvent> initial);
  SnapshotResult advance(std::span<const EdgeEvent> batch);

  // Starts tracking another node; it is initialized once it exists.
  void add_source(NodeId s);
  // Pads the graph with isolated nodes up to n.
  void ensure_nodes(std::size_t n) { graph_.ensure_nodes(n); }

  bool started() const noexcept { return started_; }
  const Graph& graph() const noexcept { return graph_; }
  const HashKernel& kernel() const noexcept { return kernel_; }
  const TrackerConfig& config() const noexcept { return cfg_; }
  // Null until the source is initialized.
  const PprState* state(NodeId s) const;

 private:
  SnapshotResult finish_snapshot(std::span<const AppliedEvent> applied, std::size_t events,
                                 bool first_snapshot);
  void solve_ista(PprState& st, double push_epsilon) const;

  TrackerConfig cfg_;
  HashKernel kernel_;
  Graph graph_;
  std::vector<NodeId> sources_;
  std::vector<std::optional<PprState>> states_;
  bool started_ = false;
};

// One DynamicSNE step for a single source: apply the batch to g, adjust and
// re-push the state at snapshot_epsilon, project.
Embedding dynamic_sne(Graph& g, std::span<const EdgeEvent> batch, PprState& state,
                      const HashKernel& kernel, const DynPprConfig& cfg,
                      PushStats* stats = nullptr);

// Runs the tracker over an initial batch and T further batches. Entry k holds
// the embeddings of cfg.subset[k] for t = 1..T (snapshots before the source
// existed are skipped).
std::vector<std::vector<Embedding>> dynamic_ppe(std::span<const EdgeEvent> initial,
                                                std::span<const EventBatch> batches,
                                                const TrackerConfig& cfg);

}  // namespace dynppr
