#include <cmath>
#include <random>

#include "doctest.h"
#include "dynppr/errors.hpp"
#include "dynppr/ppr_oracle.hpp"
#include "dynppr/ppr_opt.hpp"
#include "dynppr/ppr_push.hpp"
#include "test_support.hpp"

using namespace dynppr;
using namespace dynppr::testing;

namespace {

IstaOptions opts(double alpha, double eps) {
  IstaOptions o;
  o.alpha = alpha;
  o.epsilon = eps;
  return o;
}

SparseVector random_sparse(std::size_t n, std::size_t nnz, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  SparseVector x;
  for (std::size_t k = 0; k < nnz; ++k) x.set(static_cast<NodeId>(rng() % n), val(rng));
  return x;
}

}  // namespace

TEST_CASE("objective at zero is zero") {
  const Graph g = triangle();
  CHECK(objective_value(g, 0, 0.15, 1e-3, SparseVector{}) == 0.0);
}

TEST_CASE("large epsilon shrinks everything to zero") {
  const Graph g = path2();
  for (double eps : {0.15, 0.2, 1.0}) {
    const IstaResult res = ista_solve(g, 0, opts(0.15, eps));
    CHECK(res.x.nnz() == 0);
    CHECK(res.ppr(g).nnz() == 0);
  }
}

TEST_CASE("two-node path agrees with push") {
  const Graph g = path2();
  const IstaResult res = ista_solve(g, 0, opts(0.15, 1e-8));
  PprState st = PprState::fresh(0);
  forward_push(g, st, PushConfig{0.15, 1e-10});
  const SparseVector pi = res.ppr(g);
  CHECK(std::abs(pi.get(0) - st.estimate.get(0)) < 1e-6);
  CHECK(std::abs(pi.get(1) - st.estimate.get(1)) < 1e-6);
}

TEST_CASE("triangle symmetry") {
  const Graph g = triangle();
  const IstaResult res = ista_solve(g, 0, opts(0.15, 1e-7));
  CHECK(res.x.get(1) == doctest::Approx(res.x.get(2)).epsilon(1e-12));
  CHECK(res.x.get(1) > 0.0);
}

TEST_CASE("dangling source falls back to the indicator") {
  Graph g;
  g.ensure_nodes(3);
  g.apply_events(EventBatch{EdgeEvent::insert(1, 2)});
  const IstaResult res = ista_solve(g, 0, opts(0.15, 1e-6));
  CHECK(res.dangling_fallback);
  const SparseVector pi = res.ppr(g);
  CHECK(pi.get(0) == 1.0);
  CHECK(pi.nnz() == 1);
}

TEST_CASE("argument errors and iteration guard") {
  const Graph g = erdos_renyi(30, 0.2, 4);
  CHECK_THROWS_AS(ista_solve(g, 0, opts(0.0, 1e-6)), Error);
  CHECK_THROWS_AS(ista_solve(g, 0, opts(0.15, 0.0)), Error);
  CHECK_THROWS_AS(ista_solve(g, 99, opts(0.15, 1e-6)), Error);
  IstaOptions o = opts(0.15, 1e-8);
  o.max_iter = 2;
  try {
    ista_solve(g, 0, o);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoConvergence);
  }
}

TEST_CASE("property: objective never increases") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = erdos_renyi(40 + rng() % 60, 0.1, rng());
    const auto s = static_cast<NodeId>(rng() % g.node_count());
    if (g.degree_of(s) == 0.0) continue;
    IstaOptions o = opts(0.1 + 0.05 * (trial % 5), 1e-5);
    o.record_objective = true;
    const IstaResult res = ista_solve(g, s, o);
    REQUIRE(!res.objective_trace.empty());
    CHECK(res.objective_trace.front() <= 0.0);
    for (std::size_t k = 1; k < res.objective_trace.size(); ++k) {
      CHECK(res.objective_trace[k] <= res.objective_trace[k - 1] + 1e-15);
    }
  }
}

TEST_CASE("property: analytic gradient matches central differences") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = erdos_renyi(25, 0.2, rng());
    const double alpha = 0.15;
    const NodeId s = 0;
    if (g.degree_of(s) == 0.0) continue;
    const SparseVector x = random_sparse(25, 8, rng);
    const SparseVector grad = smooth_gradient(g, s, alpha, x);
    for (NodeId i = 0; i < 25; ++i) {
      if (g.degree_of(i) == 0.0) continue;
      const double h = 1e-5;
      SparseVector plus = x, minus = x;
      plus.add(i, h);
      minus.add(i, -h);
      const double fd = (smooth_objective(g, s, alpha, plus) - smooth_objective(g, s, alpha, minus)) / (2 * h);
      const double an = grad.get(i);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("a small step along the negative gradient lowers the smooth part") {
  std::mt19937_64 rng(13);
  const Graph g = erdos_renyi(30, 0.2, 3);
  const SparseVector x = random_sparse(30, 10, rng);
  const SparseVector grad = smooth_gradient(g, 1, 0.15, x);
  SparseVector y = x;
  grad.for_each([&](NodeId i, double gi) { y.add(i, -1e-3 * gi); });
  CHECK(smooth_objective(g, 1, 0.15, y) < smooth_objective(g, 1, 0.15, x));
}

TEST_CASE("incremental and full gradient modes agree") {
  const Graph g = erdos_renyi(60, 0.1, 17);
  IstaOptions inc = opts(0.15, 1e-6);
  IstaOptions full = inc;
  full.full_gradient = true;
  const IstaResult a = ista_solve(g, 2, inc);
  const IstaResult b = ista_solve(g, 2, full);
  CHECK(a.iterations == b.iterations);
  for (NodeId u = 0; u < 60; ++u) CHECK(std::abs(a.x.get(u) - b.x.get(u)) < 1e-12);
}

TEST_CASE("residual sign convention satisfies the push invariant") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = erdos_renyi(40, 0.12, rng());
    const double alpha = 0.2;
    if (g.degree_of(0) == 0.0) continue;
    const IstaResult res = ista_solve(g, 0, opts(alpha, 1e-4));
    DenseOracle oracle(g, alpha);
    const Eigen::MatrixXd all = oracle.all();
    const SparseVector p = res.ppr(g);
    const SparseVector r = res.residual(g, alpha);
    double gap = 0.0, flipped_gap = 0.0;
    for (NodeId u = 0; u < 40; ++u) {
      double rhs = p.get(u), flipped = p.get(u);
      r.for_each([&](NodeId v, double rv) {
        rhs += rv * all(u, v);
        flipped -= rv * alpha * all(u, v);  // the +D^{1/2} grad reading
      });
      gap = std::max(gap, std::abs(all(u, 0) - rhs));
      flipped_gap = std::max(flipped_gap, std::abs(all(u, 0) - flipped));
    }
    CHECK(gap < 1e-12);
    CHECK(flipped_gap > 1e-6);
  }
}

TEST_CASE("property: fixed point error bounds") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 20 + rng() % 100;
    const Graph g = erdos_renyi(n, 0.1, rng());
    const auto s = static_cast<NodeId>(rng() % n);
    if (g.degree_of(s) == 0.0) continue;
    const double alpha = 0.15;
    const double push_eps = 1e-6;
    const IstaResult res = ista_solve(g, s, opts(alpha, ista_epsilon_for_push(push_eps, alpha)));
    const auto pi = ppr_dense_oracle(g, s, alpha);
    const SparseVector est = res.ppr(g);
    double l1 = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      const double err = std::abs(est.get(u) - pi[u]);
      l1 += err;
      CHECK(err <= 2.0 * push_eps * g.degree_of(u) + 1e-12);
    }
    CHECK(l1 <= 10.0 * push_eps * static_cast<double>(g.edge_count()));
  }
}

TEST_CASE("support stays inside the source component") {
  // Two disjoint triangles.
  const Graph g = from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const IstaResult res = ista_solve(g, 0, opts(0.15, 1e-9));
  for (NodeId u : res.x.support()) CHECK(u < 3);
  for (NodeId u : res.gradient.support()) CHECK(u < 3);
}
