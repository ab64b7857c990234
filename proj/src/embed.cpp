#include "dynppr/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dynppr/errors.hpp"
#include "dynppr/parallel.hpp"
#include "dynppr/ppr_opt.hpp"

namespace dynppr {

std::vector<double> hash_project(const SparseVector& p, std::size_t n_t,
                                 const HashKernel& kernel, ProjectionStats* stats) {
  std::vector<double> w(kernel.dim(), 0.0);
  const double n = static_cast<double>(n_t);
  std::size_t touched = 0;
  p.for_each([&](NodeId i, double pi) {
    ++touched;
    const double scaled = pi * n;
    if (!(scaled > 1.0)) return;
    w[kernel.bucket(i)] += kernel.sign(i) * std::log(scaled);
  });
  if (stats) stats->touched += touched;
  return w;
}

void validate(const TrackerConfig& cfg) {
  if (cfg.subset.empty()) throw Error(ErrorCode::kConfig, "tracked subset is empty");
  std::vector<NodeId> sorted = cfg.subset;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kConfig, "tracked subset contains duplicates");
  }
  if (cfg.dim == 0) throw Error(ErrorCode::kConfig, "embedding dimension must be >= 1");
  validate(cfg.ppr);
}

DynamicPpe::DynamicPpe(TrackerConfig cfg, Graph::Options graph_options)
    : cfg_(std::move(cfg)), kernel_(cfg_.dim, cfg_.seed), graph_(graph_options) {
  validate(cfg_);
  sources_ = cfg_.subset;
  states_.resize(sources_.size());
}

void DynamicPpe::add_source(NodeId s) {
  if (std::find(sources_.begin(), sources_.end(), s) != sources_.end()) return;
  sources_.push_back(s);
  states_.emplace_back();
}

const PprState* DynamicPpe::state(NodeId s) const {
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (sources_[i] == s) return states_[i] ? &*states_[i] : nullptr;
  }
  return nullptr;
}

void DynamicPpe::solve_ista(PprState& st, double push_epsilon) const {
  IstaOptions opts;
  opts.alpha = cfg_.ppr.alpha;
  opts.epsilon = ista_epsilon_for_push(push_epsilon, cfg_.ppr.alpha);
  const IstaResult res = ista_solve(graph_, st.source, opts);
  st.estimate = res.ppr(graph_);
  st.residual = res.residual(graph_, cfg_.ppr.alpha);
  st.epsilon_used = push_epsilon;
}

SnapshotResult DynamicPpe::initialize(std::span<const EdgeEvent> initial) {
  if (started_) throw Error(ErrorCode::kInvalidArgument, "tracker already initialized");
  graph_.apply_events(initial);
  started_ = true;
  return finish_snapshot({}, initial.size(), true);
}

SnapshotResult DynamicPpe::advance(std::span<const EdgeEvent> batch) {
  if (!started_) return initialize(batch);
  const std::vector<AppliedEvent> applied = graph_.apply_events(batch);
  return finish_snapshot(applied, batch.size(), false);
}

SnapshotResult DynamicPpe::finish_snapshot(std::span<const AppliedEvent> applied,
                                           std::size_t events, bool first_snapshot) {
  SnapshotResult out;
  // The initial batch builds snapshot 0.
  out.snapshot = graph_.snapshot_index() - 1;
  const std::size_t m = graph_.edge_count();
  const double eps_t = snapshot_epsilon(cfg_.ppr, graph_);
  const double eps_init = m == 0 ? 1.0 : 1.0 / static_cast<double>(m);

  std::vector<bool> fresh(sources_.size(), false);
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (!states_[i] && graph_.contains(sources_[i])) {
      states_[i] = PprState::fresh(sources_[i]);
      fresh[i] = true;
    }
  }

  out.work.snapshot = out.snapshot;
  out.work.events = events;
  out.work.epsilon = eps_t;
  out.work.per_source.assign(sources_.size(), PushStats{});
  std::vector<std::optional<Embedding>> embeddings(sources_.size());

  parallel_for(sources_.size(), worker_threads(), [&](std::size_t i) {
    if (!states_[i]) return;
    PprState& st = *states_[i];
    PushStats& stats = out.work.per_source[i];
    if (cfg_.solver == PprSolver::kIsta) {
      solve_ista(st, first_snapshot ? eps_init : eps_t);
    } else if (fresh[i]) {
      stats += forward_push(graph_, st, PushConfig{cfg_.ppr.alpha, eps_init, cfg_.ppr.frontier});
      if (!first_snapshot) {
        stats += forward_push(graph_, st, PushConfig{cfg_.ppr.alpha, eps_t, cfg_.ppr.frontier});
      }
    } else {
      stats = update_state(st, graph_, applied, cfg_.ppr);
    }
    embeddings[i] = Embedding{st.source, out.snapshot,
                              hash_project(st.estimate, graph_.node_count(), kernel_)};
  });

  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (fresh[i]) out.newly_initialized.push_back(sources_[i]);
    if (embeddings[i]) out.embeddings.push_back(std::move(*embeddings[i]));
  }
  std::sort(out.embeddings.begin(), out.embeddings.end(),
            [](const Embedding& a, const Embedding& b) { return a.node < b.node; });
  std::sort(out.newly_initialized.begin(), out.newly_initialized.end());
  return out;
}

Embedding dynamic_sne(Graph& g, std::span<const EdgeEvent> batch, PprState& state,
                      const HashKernel& kernel, const DynPprConfig& cfg, PushStats* stats) {
  validate(cfg);
  const std::vector<AppliedEvent> applied = g.apply_events(batch);
  const PushStats s = update_state(state, g, applied, cfg);
  if (stats) *stats += s;
  return Embedding{state.source, g.snapshot_index() - 1,
                   hash_project(state.estimate, g.node_count(), kernel)};
}

std::vector<std::vector<Embedding>> dynamic_ppe(std::span<const EdgeEvent> initial,
                                                std::span<const EventBatch> batches,
                                                const TrackerConfig& cfg) {
  DynamicPpe tracker(cfg);
  tracker.initialize(initial);
  std::vector<std::vector<Embedding>> out(cfg.subset.size());
  for (const EventBatch& batch : batches) {
    SnapshotResult snap = tracker.advance(batch);
    for (Embedding& e : snap.embeddings) {
      const auto k = std::find(cfg.subset.begin(), cfg.subset.end(), e.node) - cfg.subset.begin();
      out[static_cast<std::size_t>(k)].push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace dynppr
