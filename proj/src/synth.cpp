#include "dynppr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_map>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Edge set with O(1) insert, erase and uniform sampling.
class EdgePool {
 public:
  bool contains(NodeId a, NodeId b) const { return pos_.count(edge_key(a, b)) != 0; }
  std::size_t size() const { return edges_.size(); }

  void insert(NodeId a, NodeId b) {
    pos_[edge_key(a, b)] = edges_.size();
    edges_.emplace_back(a, b);
    ++degree(a);
    ++degree(b);
  }

  void erase(NodeId a, NodeId b) {
    auto it = pos_.find(edge_key(a, b));
    const std::size_t i = it->second;
    pos_.erase(it);
    if (i + 1 != edges_.size()) {
      edges_[i] = edges_.back();
      pos_[edge_key(edges_[i].first, edges_[i].second)] = i;
    }
    edges_.pop_back();
    --degree(a);
    --degree(b);
  }

  const std::pair<NodeId, NodeId>& at(std::size_t i) const { return edges_[i]; }

  std::size_t& degree(NodeId v) {
    if (v >= degree_.size()) degree_.resize(v + 1, 0);
    return degree_[v];
  }

  std::vector<NodeId> neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (const auto& [a, b] : edges_) {
      if (a == v) out.push_back(b);
      if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::unordered_map<std::uint64_t, std::size_t> pos_;
  std::vector<std::size_t> degree_;
};

class StreamBuilder {
 public:
  explicit StreamBuilder(const StreamSpec& spec) : spec_(spec), rng_(spec.seed) {}

  GeneratedStream run() {
    GeneratedStream out;
    out.batches.resize(spec_.batches);
    const bool shock = spec_.generator == Generator::kShockInjection;
    if (shock) {
      out.shock_batch = spec_.shock.batch == 0 ? spec_.batches / 2 : spec_.shock.batch;
      if (out.shock_batch >= spec_.batches) {
        throw Error(ErrorCode::kInfeasibleSpec, "shock batch outside the stream");
      }
    }

    for (std::size_t t = 0; t < spec_.batches; ++t) {
      EventBatch& batch = out.batches[t];
      const std::size_t active = active_nodes(t);
      if (shock && t == out.shock_batch) out.shocked_node = pick_target(active);
      const NodeId avoid = (shock && t == out.shock_batch) ? *out.shocked_node : kInvalidNode;
      const auto deletions =
          static_cast<std::size_t>(std::floor(spec_.deletion_fraction * static_cast<double>(spec_.batch_size)));
      const std::size_t insertions = spec_.batch_size - deletions;

      for (std::size_t k = 0; k < insertions; ++k) {
        const auto [u, v] = spec_.generator == Generator::kPreferentialAttachment
                                ? pick_preferential(active)
                                : pick_uniform(active, avoid);
        pool_.insert(u, v);
        batch.push_back(EdgeEvent::insert(u, v, static_cast<std::int64_t>(t)));
      }
      for (std::size_t k = 0; k < deletions; ++k) {
        const auto [u, v] = pick_existing(avoid);
        pool_.erase(u, v);
        batch.push_back(EdgeEvent::remove(u, v, static_cast<std::int64_t>(t)));
      }
      if (avoid != kInvalidNode) inject_shock(avoid, active, batch, static_cast<std::int64_t>(t));
    }
    return out;
  }

 private:
  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  // Linear growth, but never so few nodes that the edges inserted so far
  // would fill more than half of the complete graph on them.
  std::size_t active_nodes(std::size_t t) const {
    const double frac = static_cast<double>(t + 1) / static_cast<double>(spec_.batches);
    const auto linear = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(spec_.nodes)));
    const double inserted = static_cast<double>(t + 1) * static_cast<double>(spec_.batch_size);
    const auto room = static_cast<std::size_t>(std::ceil((1.0 + std::sqrt(1.0 + 16.0 * inserted)) / 2.0));
    return std::clamp<std::size_t>(std::max(linear, room), 2, spec_.nodes);
  }

  [[noreturn]] void infeasible(const std::string& why) const {
    throw Error(ErrorCode::kInfeasibleSpec, why);
  }

  std::pair<NodeId, NodeId> pick_uniform(std::size_t active, NodeId avoid) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const auto u = static_cast<NodeId>(uniform(active));
      const auto v = static_cast<NodeId>(uniform(active));
      if (u == v || u == avoid || v == avoid || pool_.contains(u, v)) continue;
      return {u, v};
    }
    infeasible("cannot place another edge among " + std::to_string(active) + " nodes");
  }

  // New nodes attach to a degree-proportional target; otherwise both
  // endpoints are degree-proportional. An endpoint of a uniform random edge
  // is a degree-proportional sample.
  std::pair<NodeId, NodeId> pick_preferential(std::size_t active) {
    auto pref = [&]() -> NodeId {
      const auto& e = pool_.at(uniform(pool_.size()));
      return uniform(2) == 0 ? e.first : e.second;
    };
    if (pool_.size() == 0) {
      next_new_ = std::max<NodeId>(next_new_, 2);
      return {0, 1};
    }
    if (next_new_ < active) {
      const NodeId fresh = next_new_++;
      return {fresh, pref()};
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const NodeId u = pref();
      const NodeId v = pref();
      if (u != v && !pool_.contains(u, v)) return {u, v};
    }
    return pick_uniform(active, kInvalidNode);
  }

  std::pair<NodeId, NodeId> pick_existing(NodeId avoid) {
    for (int attempt = 0; attempt < 10000 && pool_.size() > 0; ++attempt) {
      const auto e = pool_.at(uniform(pool_.size()));
      if (e.first == avoid || e.second == avoid) continue;
      return e;
    }
    infeasible("deletion requested but no deletable edge is present");
  }

  // Number of edges the shock needs to add at a node of degree d.
  std::size_t shock_additions(std::size_t d) const {
    const auto after = static_cast<std::size_t>(std::llround(spec_.shock.factor * static_cast<double>(d)));
    const auto drop = std::min<std::size_t>(
        d, static_cast<std::size_t>(std::llround(spec_.shock.rewire_fraction * static_cast<double>(d))));
    return after - (d - drop);
  }

  // The requested node, or a random first-batch node whose shock fits in
  // the active node set. Regular events of the shock batch avoid the target,
  // so its degree is known here.
  NodeId pick_target(std::size_t active) {
    if (spec_.shock.node != kInvalidNode) return spec_.shock.node;
    std::vector<NodeId> feasible;
    for (NodeId v = 0; v < active_nodes(0); ++v) {
      const std::size_t d = pool_.degree(v);
      if (d > 0 && shock_additions(d) + d + 1 <= active) feasible.push_back(v);
    }
    if (feasible.empty()) infeasible("no first-batch node can take the requested shock");
    return feasible[uniform(feasible.size())];
  }

  void inject_shock(NodeId target, std::size_t active, EventBatch& batch, std::int64_t ts) {
    const std::size_t before = pool_.degree(target);
    if (before == 0) infeasible("shocked node has no edges before the shock batch");
    const auto after = static_cast<std::size_t>(
        std::llround(spec_.shock.factor * static_cast<double>(before)));
    auto drop = static_cast<std::size_t>(
        std::llround(spec_.shock.rewire_fraction * static_cast<double>(before)));
    drop = std::min(drop, before);

    std::vector<NodeId> nbrs = pool_.neighbors(target);
    std::shuffle(nbrs.begin(), nbrs.end(), rng_);
    for (std::size_t k = 0; k < drop; ++k) {
      pool_.erase(target, nbrs[k]);
      batch.push_back(EdgeEvent::remove(target, nbrs[k], ts));
    }
    std::vector<NodeId> candidates;
    for (NodeId v = 0; v < active; ++v) {
      if (v != target && !pool_.contains(target, v)) candidates.push_back(v);
    }
    // Fresh neighbors only: just-dropped ones would undo the rewiring.
    std::erase_if(candidates, [&](NodeId v) {
      return std::find(nbrs.begin(), nbrs.begin() + static_cast<std::ptrdiff_t>(drop), v) !=
             nbrs.begin() + static_cast<std::ptrdiff_t>(drop);
    });
    const std::size_t current = pool_.degree(target);
    if (after < current) infeasible("shock factor too small for the rewire fraction");
    const std::size_t add = after - current;
    if (add > candidates.size()) infeasible("not enough nodes to realize the shock");
    std::shuffle(candidates.begin(), candidates.end(), rng_);
    for (std::size_t k = 0; k < add; ++k) {
      pool_.insert(target, candidates[k]);
      batch.push_back(EdgeEvent::insert(target, candidates[k], ts));
    }
  }

  const StreamSpec& spec_;
  std::mt19937_64 rng_;
  EdgePool pool_;
  NodeId next_new_ = 0;
};

}  // namespace

GeneratedStream generate(const StreamSpec& spec) {
  if (!(spec.deletion_fraction >= 0.0 && spec.deletion_fraction < 1.0)) {
    throw Error(ErrorCode::kInfeasibleSpec, "deletion fraction must lie in [0, 1)");
  }
  if (spec.nodes < 2 && spec.batch_size > 0) {
    throw Error(ErrorCode::kInfeasibleSpec, "node budget must be at least 2");
  }
  if (spec.generator == Generator::kShockInjection &&
      (!(spec.shock.factor >= 1.0) || !(spec.shock.rewire_fraction >= 0.0 &&
                                        spec.shock.rewire_fraction <= 1.0))) {
    throw Error(ErrorCode::kInfeasibleSpec, "shock factor must be >= 1, rewire fraction in [0,1]");
  }
  return StreamBuilder(spec).run();
}

}  // namespace dynppr
