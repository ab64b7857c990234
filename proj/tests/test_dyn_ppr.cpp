#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "dynppr/dyn_ppr.hpp"
#include "dynppr/errors.hpp"
#include "dynppr/ppr_oracle.hpp"
#include "dynppr/synth.hpp"
#include "test_support.hpp"

using namespace dynppr;
using namespace dynppr::testing;

namespace {

double invariant_gap(const Graph& g, const PprState& st, double alpha) {
  DenseOracle oracle(g, alpha);
  const Eigen::MatrixXd all = oracle.all();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(all.rows());
  st.estimate.for_each([&](NodeId u, double v) { rhs(u) += v; });
  st.residual.for_each([&](NodeId v, double rv) { rhs += rv * all.col(v); });
  return (all.col(st.source) - rhs).cwiseAbs().maxCoeff();
}

double mass(const PprState& st) { return st.estimate.sum() + st.residual.sum(); }

// Random valid event against the current graph: delete an existing edge
// with probability pdel, otherwise insert a fresh one.
EdgeEvent random_event(const Graph& g, std::size_t n, double pdel, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    if (g.edge_count() > 0 && unit(rng) < pdel) {
      const auto u = static_cast<NodeId>(rng() % g.node_count());
      const auto nb = g.neighbors(u);
      if (nb.empty()) continue;
      return EdgeEvent::remove(u, nb[rng() % nb.size()].node);
    }
    const auto u = static_cast<NodeId>(rng() % n);
    const auto v = static_cast<NodeId>(rng() % n);
    if (u == v || (g.contains(std::max(u, v)) && g.has_edge(u, v))) continue;
    return EdgeEvent::insert(u, v, 0, 0.5 + static_cast<double>(rng() % 4) * 0.5);
  }
}

}  // namespace

TEST_CASE("insert update example") {
  PprState st = PprState::fresh(9);
  st.residual = SparseVector{};
  st.estimate.set(0, 0.5);
  const AppliedEvent ev{0, 1, EdgeOp::kInsert, 1.0, 3.0, 1.0};
  apply_event_to_state(st, ev, 0.15);
  CHECK(st.estimate.get(0) == doctest::Approx(0.75));
  CHECK(st.residual.get(0) == doctest::Approx(-1.6666667).epsilon(1e-7));
  CHECK(st.residual.get(1) == doctest::Approx(1.4166667).epsilon(1e-7));
  CHECK(st.estimate.get(1) == 0.0);
}

TEST_CASE("delete update uses the post-delete degree") {
  PprState st = PprState::fresh(9);
  st.residual = SparseVector{};
  st.estimate.set(0, 0.6);
  apply_event_to_state(st, AppliedEvent{0, 1, EdgeOp::kDelete, 1.0, 2.0, 4.0}, 0.5);
  // dp = -0.6 / 3
  CHECK(st.estimate.get(0) == doctest::Approx(0.4));
  CHECK(st.residual.get(0) == doctest::Approx(0.4));
  CHECK(st.residual.get(1) == doctest::Approx(-0.2));
}

TEST_CASE("zero estimate at both endpoints leaves the state unchanged") {
  PprState st = PprState::fresh(5);
  const PprState before = st;
  apply_event_to_state(st, AppliedEvent{0, 1, EdgeOp::kInsert, 1.0, 4.0, 2.0}, 0.15);
  CHECK(st.residual.get(5) == before.residual.get(5));
  CHECK(st.residual.nnz() == 1);
  CHECK(st.estimate.nnz() == 0);
}

TEST_CASE("degree underflow is reported") {
  PprState st = PprState::fresh(0);
  try {
    apply_event_to_state(st, AppliedEvent{0, 1, EdgeOp::kInsert, 1.0, 0.5, 1.0}, 0.15);
    FAIL("expected DegreeUnderflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegreeUnderflow);
  }
}

TEST_CASE("property: each event adjustment preserves the invariant and p+r mass") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 8 + rng() % 30;
    Graph g;
    g.ensure_nodes(n);
    // Sparse start so deletions drive nodes to isolation and inserts revive them.
    for (std::size_t k = 0; k < n; ++k) g.apply_events(EventBatch{random_event(g, n, 0.0, rng)});
    const double alpha = 0.1 + 0.1 * (trial % 5);
    PprState st = PprState::fresh(static_cast<NodeId>(rng() % n));
    forward_push(g, st, PushConfig{alpha, 1e-3});
    for (int step = 0; step < 30; ++step) {
      const EdgeEvent ev = random_event(g, n, 0.45, rng);
      const EdgeEvent applied_ev = ev.op == EdgeOp::kDelete
                                       ? EdgeEvent{ev.u, ev.v, ev.op, 0, g.edge_weight(ev.u, ev.v)}
                                       : ev;
      g.apply_events(EventBatch{ev});
      const double before = mass(st);
      apply_event_to_state(st, g, applied_ev, alpha);
      CHECK(mass(st) == doctest::Approx(before).epsilon(1e-12));
      CHECK(invariant_gap(g, st, alpha) < 1e-10);
      if (step % 7 == 0) forward_push(g, st, PushConfig{alpha, 1e-3});
    }
  }
}

TEST_CASE("update plus push matches a from-scratch push within the error bound") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 60;
    Graph g = erdos_renyi(n, 0.08, rng());
    const DynPprConfig cfg{1e-4, 0.15, false};
    std::vector<PprState> states{PprState::fresh(0), PprState::fresh(1)};
    for (auto& st : states) forward_push(g, st, PushConfig{cfg.alpha, cfg.epsilon});
    EventBatch batch;
    Graph shadow = g;
    for (int k = 0; k < 20; ++k) {
      batch.push_back(random_event(shadow, n, 0.3, rng));
      shadow.apply_events(EventBatch{batch.back()});
    }
    advance_snapshot(states, g, batch, cfg);
    CHECK(g == shadow);
    DenseOracle oracle(g, cfg.alpha);
    for (const auto& st : states) {
      PprState scratch = PprState::fresh(st.source);
      forward_push(g, scratch, PushConfig{cfg.alpha, cfg.epsilon});
      const auto pi = oracle.ppr(st.source);
      for (NodeId u = 0; u < n; ++u) {
        const double bound = cfg.epsilon * g.degree_of(u) + 1e-12;
        CHECK(std::abs(st.estimate.get(u) - pi[u]) <= bound);
        CHECK(std::abs(scratch.estimate.get(u) - pi[u]) <= bound);
      }
    }
  }
}

TEST_CASE("adaptive precision keeps the l1 error below epsilon on a growing stream") {
  StreamSpec spec;
  spec.nodes = 120;
  spec.batches = 12;
  spec.batch_size = 40;
  spec.seed = 3;
  const GeneratedStream stream = generate(spec);
  DynPprConfig cfg;  // eps = 0.1, adaptive
  Graph g;
  g.apply_events(stream.batches[0]);
  std::vector<PprState> states;
  for (NodeId s = 0; s < 5; ++s) {
    if (!g.contains(s)) continue;
    states.push_back(PprState::fresh(s));
    forward_push(g, states.back(), PushConfig{cfg.alpha, 1.0 / static_cast<double>(g.edge_count())});
  }
  REQUIRE(!states.empty());
  for (std::size_t t = 1; t < stream.batches.size(); ++t) {
    advance_snapshot(states, g, stream.batches[t], cfg);
    DenseOracle oracle(g, cfg.alpha);
    for (const auto& st : states) CHECK(l1_gap(st.estimate, oracle.ppr(st.source)) <= cfg.epsilon);
  }
}

TEST_CASE("permuting a batch keeps every order within the same bound") {
  std::mt19937_64 rng(12);
  Graph base = erdos_renyi(50, 0.1, 1);
  const DynPprConfig cfg{1e-3, 0.15, false};
  PprState st0 = PprState::fresh(4);
  forward_push(base, st0, PushConfig{cfg.alpha, cfg.epsilon});
  EventBatch batch;
  Graph shadow = base;
  for (int k = 0; k < 25; ++k) {
    batch.push_back(random_event(shadow, 50, 0.3, rng));
    shadow.apply_events(EventBatch{batch.back()});
  }
  DenseOracle oracle(shadow, cfg.alpha);
  const auto pi = oracle.ppr(4);
  // Orders that touch an edge before it exists are rejected and skipped.
  int valid = 0;
  for (int perm = 0; perm < 20; ++perm) {
    EventBatch order = batch;
    std::shuffle(order.begin(), order.end(), rng);
    Graph g = base;
    std::vector<PprState> states{st0};
    try {
      advance_snapshot(states, g, order, cfg);
    } catch (const Error&) {
      continue;
    }
    ++valid;
    for (NodeId u = 0; u < 50; ++u) {
      CHECK(std::abs(states[0].estimate.get(u) - pi[u]) <= cfg.epsilon * g.degree_of(u) + 1e-12);
    }
  }
  CHECK(valid > 0);
}

TEST_CASE("empty batch with fixed epsilon is a no-op") {
  Graph g = erdos_renyi(40, 0.1, 9);
  const DynPprConfig cfg{1e-3, 0.15, false};
  std::vector<PprState> states{PprState::fresh(0)};
  forward_push(g, states[0], PushConfig{cfg.alpha, cfg.epsilon});
  const SparseVector p = states[0].estimate;
  const BatchWork work = advance_snapshot(states, g, EventBatch{}, cfg);
  CHECK(work.total_volume() == 0.0);
  CHECK(work.per_source[0].pushes == 0);
  for (NodeId u = 0; u < 40; ++u) CHECK(states[0].estimate.get(u) == p.get(u));
}

TEST_CASE("a single fresh batch respects the work bound at eps_t") {
  Graph g;
  const DynPprConfig cfg;
  std::vector<PprState> states{PprState::fresh(0)};
  const Graph ref = erdos_renyi(80, 0.1, 4);
  EventBatch batch;
  for (NodeId u = 0; u < 80; ++u) {
    for (const Neighbor& nb : ref.adjacency(u)) {
      if (u < nb.node) batch.push_back(EdgeEvent::insert(u, nb.node));
    }
  }
  const BatchWork work = advance_snapshot(states, g, batch, cfg);
  const double eps_t = cfg.epsilon / g.volume();
  CHECK(work.epsilon == doctest::Approx(eps_t));
  CHECK(work.per_source[0].volume <= (1.0 - states[0].residual.l1_norm()) / (cfg.alpha * eps_t));
}

TEST_CASE("invalid batch propagates and leaves states alone") {
  Graph g = from_edges(3, {{0, 1}});
  std::vector<PprState> states{PprState::fresh(0)};
  CHECK_THROWS_AS(advance_snapshot(states, g, EventBatch{EdgeEvent::remove(1, 2)}, DynPprConfig{}),
                  Error);
  CHECK(states[0].residual.get(0) == 1.0);
}

TEST_CASE("config validation and epsilon schedule") {
  CHECK_THROWS_AS(validate(DynPprConfig{0.0}), Error);
  CHECK_THROWS_AS(validate(DynPprConfig{2.5}), Error);
  CHECK_NOTHROW(validate(DynPprConfig{2.0}));
  const Graph g = erdos_renyi(30, 0.2, 2);
  const double m = static_cast<double>(g.edge_count());
  CHECK(snapshot_epsilon(DynPprConfig{0.1}, g) == doctest::Approx(0.1 / (2 * m)));
  DynPprConfig per_edge{0.1};
  per_edge.scale = AdaptiveScale::kEdgeCount;
  CHECK(snapshot_epsilon(per_edge, g) == doctest::Approx(0.1 / m));
  CHECK(snapshot_epsilon(DynPprConfig{0.1, 0.15, false}, g) == 0.1);
  Graph empty;
  empty.ensure_nodes(4);
  CHECK(snapshot_epsilon(DynPprConfig{0.1}, empty) == 0.1);
}

TEST_CASE("DYNPPR_THREADS caps the worker count") {
  setenv("DYNPPR_THREADS", "1", 1);
  CHECK(worker_threads() == 1);
  unsetenv("DYNPPR_THREADS");
  CHECK(worker_threads() >= 1);
}
