#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dynppr/types.hpp"

namespace dynppr {

enum class EdgeOp : std::uint8_t { kInsert, kDelete };

struct EdgeEvent {
  NodeId u = 0;
  NodeId v = 0;
  EdgeOp op = EdgeOp::kInsert;
  std::int64_t timestamp = 0;
  double weight = 1.0;

  static EdgeEvent insert(NodeId u, NodeId v, std::int64_t ts = 0, double w = 1.0) {
    return {u, v, EdgeOp::kInsert, ts, w};
  }
  static EdgeEvent remove(NodeId u, NodeId v, std::int64_t ts = 0) {
    return {u, v, EdgeOp::kDelete, ts, 1.0};
  }

  bool operator==(const EdgeEvent&) const = default;
};

using EventBatch = std::vector<EdgeEvent>;

// An event as it was applied, with the endpoint degrees right after it.
// Dynamic PPR replays these so the graph is traversed only once per batch.
struct AppliedEvent {
  NodeId u;
  NodeId v;
  EdgeOp op;
  double weight;
  double degree_u_after;
  double degree_v_after;
};

struct Neighbor {
  NodeId node;
  double weight;

  bool operator==(const Neighbor&) const = default;
};

// Undirected weighted graph that evolves by batches of edge events.
//
// Adjacency lists are kept sorted by neighbor id. The degree of a node is
// recomputed from its adjacency list on every change, so the degree index
// always equals a fresh recomputation bit for bit.
class Graph {
 public:
  struct Options {
    bool allow_self_loops = false;
  };

  Graph() = default;
  explicit Graph(Options options) : options_(options) {}

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  // Sum of all degrees; 2 * edge_count() with unit weights and no self-loops.
  double volume() const noexcept { return volume_; }
  std::uint64_t snapshot_index() const noexcept { return snapshot_; }
  const Options& options() const noexcept { return options_; }

  bool contains(NodeId v) const noexcept { return v < adjacency_.size(); }

  // Checked accessors; throw Error(kUnknownNode).
  double degree(NodeId v) const;
  std::span<const Neighbor> neighbors(NodeId v) const;

  // Unchecked accessors for solver inner loops.
  double degree_of(NodeId v) const noexcept { return degree_[v]; }
  std::span<const Neighbor> adjacency(NodeId v) const noexcept { return adjacency_[v]; }
  std::span<const double> degrees() const noexcept { return degree_; }

  bool has_edge(NodeId u, NodeId v) const;
  // Weight of edge (u,v), or 0 if absent.
  double edge_weight(NodeId u, NodeId v) const;

  // Grows the node set to at least n nodes; new nodes are isolated.
  void ensure_nodes(std::size_t n);

  // Applies a batch atomically and advances the snapshot index. On an invalid
  // event the graph is restored to its state before the call and
  // Error(kInvalidEvent) is thrown.
  std::vector<AppliedEvent> apply_events(std::span<const EdgeEvent> batch);

  // Sum of incident weights recomputed from adjacency.
  double recompute_degree(NodeId v) const;

  bool operator==(const Graph& other) const {
    return adjacency_ == other.adjacency_ && degree_ == other.degree_ &&
           edge_count_ == other.edge_count_;
  }

 private:
  void insert_edge(NodeId u, NodeId v, double w);
  void erase_edge(NodeId u, NodeId v);
  void refresh_degree(NodeId v);

  Options options_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> degree_;
  std::size_t edge_count_ = 0;
  double volume_ = 0.0;
  std::uint64_t snapshot_ = 0;
};

// Splits a single event stream into snapshot batches.
class SnapshotSchedule {
 public:
  // Every batch_size events form one batch (the last may be shorter).
  static SnapshotSchedule by_event_count(std::size_t batch_size);
  // Batch k holds events with cut[k-1] <= ts < cut[k]; events at or past the
  // last cut form a trailing batch.
  static SnapshotSchedule by_timestamp_cuts(std::vector<std::int64_t> cuts);

  std::vector<EventBatch> split(std::span<const EdgeEvent> stream) const;

  bool by_count() const noexcept { return batch_size_ != 0; }
  std::size_t batch_size() const noexcept { return batch_size_; }
  const std::vector<std::int64_t>& cuts() const noexcept { return cuts_; }

 private:
  std::size_t batch_size_ = 0;
  std::vector<std::int64_t> cuts_;
};

}  // namespace dynppr
