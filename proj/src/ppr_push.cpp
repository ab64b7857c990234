#include "dynppr/ppr_push.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "dynppr/errors.hpp"

namespace dynppr {

PprState PprState::fresh(NodeId source) {
  PprState st;
  st.source = source;
  st.residual.set(source, 1.0);
  return st;
}

void validate(const PushConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  }
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
}

namespace {

// sign = +1 selects r(u) > eps*d(u), sign = -1 selects r(u) < -eps*d(u).
inline bool active(double r, double d, double eps, double sign) {
  return sign * r > eps * d;
}

// Working copy of the residual and of the estimate increments, held in a
// per-thread dense buffer indexed by node id. Only touched cells are reset
// afterwards, so a call costs O(touched) once the buffer has grown to n.
struct Cell {
  double r = 0.0;
  double dp = 0.0;
  bool queued = false;
  bool seen = false;
};

class Work {
 public:
  static Work& local(std::size_t n) {
    thread_local Work w;
    if (w.cells_.size() < n) w.cells_.resize(n);
    return w;
  }
  Cell& operator[](NodeId u) {
    Cell& c = cells_[u];
    if (!c.seen) {
      c.seen = true;
      touched_.push_back(u);
    }
    return c;
  }
  Cell* find(NodeId u) { return &cells_[u]; }
  template <typename F>
  void for_each(F&& f) const {
    for (NodeId u : touched_) f(u, cells_[u]);
  }
  void reset() {
    for (NodeId u : touched_) cells_[u] = Cell{};
    touched_.clear();
  }

 private:
  std::vector<Cell> cells_;
  std::vector<NodeId> touched_;
};

class FifoFrontier {
 public:
  void offer(Cell& c, NodeId u, double /*score*/) {
    if (!c.queued) {
      c.queued = true;
      queue_.push_back(u);
    }
  }
  bool pop(Work& work, NodeId& u) {
    if (queue_.empty()) return false;
    u = queue_.front();
    queue_.pop_front();
    work.find(u)->queued = false;
    return true;
  }

 private:
  std::deque<NodeId> queue_;
};

// Max-heap on |r(u)|/d(u). Stale entries are tolerated; the caller re-checks
// the activation condition on pop.
class PriorityFrontier {
 public:
  void offer(Cell&, NodeId u, double score) { heap_.emplace(score, u); }
  bool pop(Work&, NodeId& u) {
    if (heap_.empty()) return false;
    u = heap_.top().second;
    heap_.pop();
    return true;
  }

 private:
  struct Less {
    bool operator()(const std::pair<double, NodeId>& a, const std::pair<double, NodeId>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return a.second > b.second;
    }
  };
  std::priority_queue<std::pair<double, NodeId>, std::vector<std::pair<double, NodeId>>, Less> heap_;
};

inline double score(double r, double d) {
  return d > 0.0 ? std::abs(r) / d : std::numeric_limits<double>::infinity();
}

// Returns false if the push budget ran out.
template <typename Frontier>
bool run_phase(const Graph& g, Work& work, double alpha, double eps,
               double sign, std::size_t budget, PushStats& stats) {
  Frontier frontier;
  const auto degrees = g.degrees();

  std::vector<NodeId> seeds;
  work.for_each([&](NodeId u, const Cell& c) {
    if (active(c.r, degrees[u], eps, sign)) seeds.push_back(u);
  });
  std::sort(seeds.begin(), seeds.end());
  for (NodeId u : seeds) {
    Cell& c = *work.find(u);
    frontier.offer(c, u, score(c.r, degrees[u]));
  }

  NodeId u;
  while (frontier.pop(work, u)) {
    Cell& cu = *work.find(u);
    const double ru = cu.r;
    const double du = degrees[u];
    if (!active(ru, du, eps, sign)) continue;
    if (budget != 0 && stats.pushes >= budget) return false;

    ++stats.pushes;
    if (sign < 0) ++stats.negative_pushes;
    cu.r = 0.0;
    if (du == 0.0) {
      cu.dp += ru;
      continue;
    }
    stats.volume += du;
    cu.dp += alpha * ru;
    const double spread = (1.0 - alpha) * ru / du;
    if (spread == 0.0) continue;
    for (const Neighbor& nb : g.adjacency(u)) {
      Cell& c = work[nb.node];
      c.r += spread * nb.weight;
      if (active(c.r, degrees[nb.node], eps, sign)) frontier.offer(c, nb.node, score(c.r, degrees[nb.node]));
    }
  }
  return true;
}

}  // namespace

PushStats forward_push(const Graph& g, PprState& state, const PushConfig& cfg) {
  validate(cfg);
  if (!g.contains(state.source)) {
    throw Error(ErrorCode::kUnknownNode, "unknown source " + std::to_string(state.source));
  }
  std::size_t n = g.node_count();
  state.residual.for_each([&](NodeId u, double) { n = std::max<std::size_t>(n, std::size_t{u} + 1); });
  Work& work = Work::local(n);
  state.residual.for_each([&](NodeId u, double r) { work[u].r = r; });

  PushStats stats;
  for (double sign : {1.0, -1.0}) {
    const bool done = cfg.frontier == FrontierPolicy::kFifo
                          ? run_phase<FifoFrontier>(g, work, cfg.alpha, cfg.epsilon, sign,
                                                    cfg.max_pushes, stats)
                          : run_phase<PriorityFrontier>(g, work, cfg.alpha, cfg.epsilon,
                                                        sign, cfg.max_pushes, stats);
    if (!done) break;
  }

  state.residual.clear();
  work.for_each([&](NodeId u, const Cell& c) {
    state.residual.set(u, c.r);
    if (c.dp != 0.0) state.estimate.add(u, c.dp);
  });
  work.reset();
  state.epsilon_used = cfg.epsilon;
  return stats;
}

}  // namespace dynppr
