#include "dynppr/dyn_ppr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "dynppr/errors.hpp"
#include "dynppr/parallel.hpp"

namespace dynppr {

void validate(const DynPprConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 2.0)) {
    throw Error(ErrorCode::kInvalidArgument, "global epsilon must lie in (0, 2]");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  }
}

double snapshot_epsilon(const DynPprConfig& cfg, const Graph& g) {
  if (!cfg.adaptive || g.edge_count() == 0) return cfg.epsilon;
  const double scale =
      cfg.scale == AdaptiveScale::kVolume ? g.volume() : static_cast<double>(g.edge_count());
  return cfg.epsilon / scale;
}

namespace {

// One direction x -> y of an edge change; d_new is x's degree after it.
void adjust_endpoint(PprState& st, NodeId x, NodeId y, EdgeOp op, double w, double d_new,
                     double alpha) {
  const double px = st.estimate.get(x);
  if (op == EdgeOp::kInsert && d_new < w * (1.0 - 1e-12)) {
    throw Error(ErrorCode::kDegreeUnderflow,
                "degree of node " + std::to_string(x) + " below inserted weight");
  }
  if (op == EdgeOp::kDelete && d_new < -1e-12 * w) {
    throw Error(ErrorCode::kDegreeUnderflow,
                "negative degree for node " + std::to_string(x));
  }
  if (px == 0.0) return;

  const double through = (1.0 - alpha) / alpha;
  if (op == EdgeOp::kInsert) {
    const double d_old = d_new - w;
    if (d_old <= 1e-12 * d_new) {
      // x was dangling: its implicit self-loop is replaced by the new edge,
      // p(x) keeps its value and the self-loop feedback moves to y.
      st.residual.add(x, -through * px);
      st.residual.add(y, through * px);
      return;
    }
    const double dp = px * w / d_old;
    st.estimate.add(x, dp);
    st.residual.add(x, -dp / alpha);
    st.residual.add(y, dp / alpha - dp);
  } else {
    const double dp = -px * w / (d_new + w);
    st.estimate.add(x, dp);
    st.residual.add(x, -dp / alpha);
    st.residual.add(y, dp / alpha - dp);
  }
}

}  // namespace

void apply_event_to_state(PprState& state, const AppliedEvent& ev, double alpha) {
  adjust_endpoint(state, ev.u, ev.v, ev.op, ev.weight, ev.degree_u_after, alpha);
  if (ev.u != ev.v) {
    adjust_endpoint(state, ev.v, ev.u, ev.op, ev.weight, ev.degree_v_after, alpha);
  }
}

void apply_event_to_state(PprState& state, const Graph& g_after, const EdgeEvent& ev,
                          double alpha) {
  const AppliedEvent applied{ev.u, ev.v, ev.op, ev.weight, g_after.degree(ev.u), g_after.degree(ev.v)};
  apply_event_to_state(state, applied, alpha);
}

double BatchWork::total_volume() const {
  double s = 0.0;
  for (const PushStats& p : per_source) s += p.volume;
  return s;
}

PushStats update_state(PprState& state, const Graph& g_after,
                       std::span<const AppliedEvent> applied, const DynPprConfig& cfg) {
  for (const AppliedEvent& ev : applied) apply_event_to_state(state, ev, cfg.alpha);
  PushConfig push{cfg.alpha, snapshot_epsilon(cfg, g_after), cfg.frontier};
  return forward_push(g_after, state, push);
}

BatchWork advance_snapshot(std::span<PprState> states, Graph& g,
                           std::span<const EdgeEvent> batch, const DynPprConfig& cfg) {
  validate(cfg);
  const std::vector<AppliedEvent> applied = g.apply_events(batch);
  BatchWork work;
  work.snapshot = g.snapshot_index();
  work.events = batch.size();
  work.epsilon = snapshot_epsilon(cfg, g);
  work.per_source.resize(states.size());
  const Graph& snapshot = g;
  parallel_for(states.size(), worker_threads(), [&](std::size_t i) {
    work.per_source[i] = update_state(states[i], snapshot, applied, cfg);
  });
  return work;
}

std::size_t worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  std::size_t n = hw == 0 ? 1 : hw;
  if (const char* env = std::getenv("DYNPPR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min(n, static_cast<std::size_t>(v));
  }
  return n;
}

}  // namespace dynppr
