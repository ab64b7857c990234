#pragma once

#include <cstddef>
#include <vector>

#include "dynppr/flat_map.hpp"
#include "dynppr/graph_store.hpp"

namespace dynppr {

// PPR as the l1-regularized quadratic
//   f(x) = 1/2 x^T W x + x^T b + eps * ||D^{1/2} x||_1
//   W = D^{-1/2} (D - (1-alpha) A) D^{-1/2},  b = -alpha D^{-1/2} e_s
// whose minimizer recovers pi ~= D^{1/2} x.

struct IstaOptions {
  double alpha = 0.15;
  // Regularization weight. The prox step soft-thresholds coordinate i at
  // epsilon * sqrt(d(i)).
  double epsilon = 1e-6;
  // 0 selects the default 10 * ceil(1 / (epsilon * alpha)).
  std::size_t max_iter = 0;
  // 0 selects epsilon * alpha; convergence is an l-inf change of x below it.
  double conv_tol = 0.0;
  // Recompute the gradient from x every iteration instead of propagating
  // coordinate changes. Debug mode.
  bool full_gradient = false;
  bool record_objective = false;
};

struct IstaResult {
  NodeId source = 0;
  SparseVector x;
  // Gradient of the smooth part, W x + b, at the returned x.
  SparseVector gradient;
  std::size_t iterations = 0;
  // Source has degree 0: no problem is solved and ppr() returns 1_s.
  bool dangling_fallback = false;
  // objective_value after each iteration, when record_objective is set.
  std::vector<double> objective_trace;

  // D^{1/2} x.
  SparseVector ppr(const Graph& g) const;
  // Push-equivalent residual r = -D^{1/2} (W x + b) / alpha. With this sign
  // the pair (ppr(), residual()) satisfies the push invariant.
  SparseVector residual(const Graph& g, double alpha) const;
};

// Step size 1/L with L = 2 - alpha bounding the spectrum of W.
inline double ista_step(double alpha) { return 1.0 / (2.0 - alpha); }

// Regularization weight whose fixed point has |r(u)| <= push_epsilon * d(u),
// the same residual guarantee as forward_push at push_epsilon.
inline double ista_epsilon_for_push(double push_epsilon, double alpha) {
  return push_epsilon * alpha * ista_step(alpha);
}

// Throws Error(kNoConvergence) after max_iter iterations,
// Error(kInvalidArgument) for alpha outside (0,1] or epsilon <= 0.
IstaResult ista_solve(const Graph& g, NodeId source, const IstaOptions& opts);

// g(x) = 1/2 x^T W x + x^T b.
double smooth_objective(const Graph& g, NodeId source, double alpha, const SparseVector& x);
// W x + b, recomputed from scratch.
SparseVector smooth_gradient(const Graph& g, NodeId source, double alpha,
                             const SparseVector& x);
// g(x) + eps * ||D^{1/2} x||_1.
double objective_value(const Graph& g, NodeId source, double alpha, double epsilon,
                       const SparseVector& x);

}  // namespace dynppr
