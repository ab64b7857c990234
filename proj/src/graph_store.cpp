#include "dynppr/graph_store.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynppr/errors.hpp"

namespace dynppr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidEvent: return "InvalidEvent";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDegreeUnderflow: return "DegreeUnderflow";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

namespace {

auto find_neighbor(const std::vector<Neighbor>& list, NodeId v) {
  return std::lower_bound(list.begin(), list.end(), v,
                          [](const Neighbor& n, NodeId id) { return n.node < id; });
}

std::string describe(const EdgeEvent& ev) {
  return std::string(ev.op == EdgeOp::kInsert ? "Insert(" : "Delete(") +
         std::to_string(ev.u) + "," + std::to_string(ev.v) + ")";
}

}  // namespace

double Graph::degree(NodeId v) const {
  if (!contains(v)) {
    throw Error(ErrorCode::kUnknownNode, "unknown node " + std::to_string(v));
  }
  return degree_[v];
}

std::span<const Neighbor> Graph::neighbors(NodeId v) const {
  if (!contains(v)) {
    throw Error(ErrorCode::kUnknownNode, "unknown node " + std::to_string(v));
  }
  return adjacency_[v];
}

bool Graph::has_edge(NodeId u, NodeId v) const { return edge_weight(u, v) > 0.0; }

double Graph::edge_weight(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) return 0.0;
  const auto& list = adjacency_[u];
  auto it = find_neighbor(list, v);
  return (it != list.end() && it->node == v) ? it->weight : 0.0;
}

void Graph::ensure_nodes(std::size_t n) {
  if (n > adjacency_.size()) {
    adjacency_.resize(n);
    degree_.resize(n, 0.0);
  }
}

double Graph::recompute_degree(NodeId v) const {
  double d = 0.0;
  for (const Neighbor& nb : adjacency_[v]) d += nb.weight;
  return d;
}

void Graph::refresh_degree(NodeId v) {
  const double d = recompute_degree(v);
  volume_ += d - degree_[v];
  degree_[v] = d;
}

void Graph::insert_edge(NodeId u, NodeId v, double w) {
  auto& lu = adjacency_[u];
  lu.insert(find_neighbor(lu, v), Neighbor{v, w});
  if (u != v) {
    auto& lv = adjacency_[v];
    lv.insert(find_neighbor(lv, u), Neighbor{u, w});
  }
  refresh_degree(u);
  if (u != v) refresh_degree(v);
  ++edge_count_;
}

void Graph::erase_edge(NodeId u, NodeId v) {
  auto& lu = adjacency_[u];
  lu.erase(find_neighbor(lu, v));
  if (u != v) {
    auto& lv = adjacency_[v];
    lv.erase(find_neighbor(lv, u));
  }
  refresh_degree(u);
  if (u != v) refresh_degree(v);
  --edge_count_;
}

std::vector<AppliedEvent> Graph::apply_events(std::span<const EdgeEvent> batch) {
  struct Undo {
    EdgeOp op;
    NodeId u, v;
    double w;
  };
  const std::size_t nodes_before = adjacency_.size();
  std::vector<Undo> undo;
  undo.reserve(batch.size());
  std::vector<AppliedEvent> applied;
  applied.reserve(batch.size());

  auto rollback = [&](const EdgeEvent& bad, const std::string& why) {
    for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
      if (it->op == EdgeOp::kInsert) {
        erase_edge(it->u, it->v);
      } else {
        insert_edge(it->u, it->v, it->w);
      }
    }
    adjacency_.resize(nodes_before);
    degree_.resize(nodes_before);
    throw Error(ErrorCode::kInvalidEvent, describe(bad) + ": " + why);
  };

  for (const EdgeEvent& ev : batch) {
    if (ev.u == kInvalidNode || ev.v == kInvalidNode) rollback(ev, "invalid node id");
    if (ev.u == ev.v && !options_.allow_self_loops) rollback(ev, "self-loop");
    if (ev.op == EdgeOp::kInsert) {
      if (!(ev.weight > 0.0) || !std::isfinite(ev.weight)) {
        rollback(ev, "weight must be positive and finite");
      }
      ensure_nodes(static_cast<std::size_t>(std::max(ev.u, ev.v)) + 1);
      if (has_edge(ev.u, ev.v)) rollback(ev, "edge already present");
      insert_edge(ev.u, ev.v, ev.weight);
      undo.push_back({EdgeOp::kInsert, ev.u, ev.v, ev.weight});
    } else {
      const double w = edge_weight(ev.u, ev.v);
      if (!(w > 0.0)) rollback(ev, "edge not present");
      erase_edge(ev.u, ev.v);
      undo.push_back({EdgeOp::kDelete, ev.u, ev.v, w});
    }
    const Undo& last = undo.back();
    applied.push_back(AppliedEvent{ev.u, ev.v, ev.op, last.w, degree_[ev.u], degree_[ev.v]});
  }
  ++snapshot_;
  return applied;
}

SnapshotSchedule SnapshotSchedule::by_event_count(std::size_t batch_size) {
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  }
  SnapshotSchedule s;
  s.batch_size_ = batch_size;
  return s;
}

SnapshotSchedule SnapshotSchedule::by_timestamp_cuts(std::vector<std::int64_t> cuts) {
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] <= cuts[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "timestamp cuts must be strictly increasing");
    }
  }
  SnapshotSchedule s;
  s.cuts_ = std::move(cuts);
  return s;
}

std::vector<EventBatch> SnapshotSchedule::split(std::span<const EdgeEvent> stream) const {
  std::vector<EventBatch> out;
  if (by_count()) {
    for (std::size_t i = 0; i < stream.size(); i += batch_size_) {
      const std::size_t end = std::min(stream.size(), i + batch_size_);
      out.emplace_back(stream.begin() + i, stream.begin() + end);
    }
    return out;
  }
  out.resize(cuts_.size() + 1);
  for (const EdgeEvent& ev : stream) {
    const auto k = std::upper_bound(cuts_.begin(), cuts_.end(), ev.timestamp) - cuts_.begin();
    out[static_cast<std::size_t>(k)].push_back(ev);
  }
  return out;
}

}  // namespace dynppr
