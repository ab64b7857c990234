#include "dynppr/ppr_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

void check(const Graph& g, NodeId source, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  }
  if (!g.contains(source)) {
    throw Error(ErrorCode::kUnknownNode, "unknown source " + std::to_string(source));
  }
}

// Adds delta * W[:, i] to out.
void add_column(const Graph& g, double alpha, NodeId i, double delta, SparseVector& out) {
  const double di = g.degree_of(i);
  out.add(i, delta);
  const double scale = -(1.0 - alpha) * delta / std::sqrt(di);
  for (const Neighbor& nb : g.adjacency(i)) {
    out.add(nb.node, scale * nb.weight / std::sqrt(g.degree_of(nb.node)));
  }
}

SparseVector product_w(const Graph& g, double alpha, const SparseVector& x) {
  SparseVector wx;
  x.for_each([&](NodeId i, double xi) { add_column(g, alpha, i, xi, wx); });
  return wx;
}

}  // namespace

SparseVector IstaResult::ppr(const Graph& g) const {
  if (dangling_fallback) return SparseVector::unit(source);
  SparseVector out;
  x.for_each([&](NodeId i, double xi) { out.set(i, xi * std::sqrt(g.degree_of(i))); });
  return out;
}

SparseVector IstaResult::residual(const Graph& g, double alpha) const {
  SparseVector out;
  if (dangling_fallback) return out;
  gradient.for_each([&](NodeId i, double gi) {
    out.set(i, -gi * std::sqrt(g.degree_of(i)) / alpha);
  });
  return out;
}

double smooth_objective(const Graph& g, NodeId source, double alpha, const SparseVector& x) {
  check(g, source, alpha);
  const SparseVector wx = product_w(g, alpha, x);
  double quad = 0.0;
  x.for_each([&](NodeId i, double xi) { quad += xi * wx.get(i); });
  const double ds = g.degree_of(source);
  const double linear = ds > 0.0 ? -alpha * x.get(source) / std::sqrt(ds) : 0.0;
  return 0.5 * quad + linear;
}

SparseVector smooth_gradient(const Graph& g, NodeId source, double alpha,
                             const SparseVector& x) {
  check(g, source, alpha);
  SparseVector grad = product_w(g, alpha, x);
  const double ds = g.degree_of(source);
  if (ds > 0.0) grad.add(source, -alpha / std::sqrt(ds));
  return grad;
}

double objective_value(const Graph& g, NodeId source, double alpha, double epsilon,
                       const SparseVector& x) {
  double reg = 0.0;
  x.for_each([&](NodeId i, double xi) { reg += std::sqrt(g.degree_of(i)) * std::abs(xi); });
  return smooth_objective(g, source, alpha, x) + epsilon * reg;
}

IstaResult ista_solve(const Graph& g, NodeId source, const IstaOptions& opts) {
  check(g, source, opts.alpha);
  if (!(opts.epsilon > 0.0) || !std::isfinite(opts.epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  IstaResult res;
  res.source = source;
  const double alpha = opts.alpha;
  const double ds = g.degree_of(source);
  if (ds == 0.0) {
    res.dangling_fallback = true;
    return res;
  }

  const double eta = ista_step(alpha);
  const double tol = opts.conv_tol > 0.0 ? opts.conv_tol : opts.epsilon * alpha;
  std::size_t max_iter = opts.max_iter;
  if (max_iter == 0) {
    const double guard = 10.0 * std::ceil(1.0 / (opts.epsilon * alpha));
    max_iter = guard >= 1e12 ? std::size_t{1000000000000} : static_cast<std::size_t>(guard);
  }

  res.gradient.set(source, -alpha / std::sqrt(ds));

  struct Change {
    NodeId node;
    double value;
    double delta;
  };
  std::vector<NodeId> active;
  std::vector<Change> changes;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    active = res.x.support();
    const auto grad_support = res.gradient.support();
    active.insert(active.end(), grad_support.begin(), grad_support.end());
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());

    changes.clear();
    double max_change = 0.0;
    for (NodeId i : active) {
      const double xi = res.x.get(i);
      const double z = xi - eta * res.gradient.get(i);
      const double threshold = opts.epsilon * std::sqrt(g.degree_of(i));
      double next = 0.0;
      if (z > threshold) {
        next = z - threshold;
      } else if (z < -threshold) {
        next = z + threshold;
      }
      const double delta = next - xi;
      if (delta != 0.0) {
        changes.push_back({i, next, delta});
        max_change = std::max(max_change, std::abs(delta));
      }
    }

    for (const Change& c : changes) res.x.set(c.node, c.value);
    if (opts.full_gradient) {
      res.gradient = smooth_gradient(g, source, alpha, res.x);
    } else {
      for (const Change& c : changes) add_column(g, alpha, c.node, c.delta, res.gradient);
    }
    res.iterations = k;
    if (opts.record_objective) {
      res.objective_trace.push_back(objective_value(g, source, alpha, opts.epsilon, res.x));
    }
    if (max_change < tol) return res;
  }
  throw Error(ErrorCode::kNoConvergence,
              "ISTA did not converge in " + std::to_string(max_iter) + " iterations");
}

}  // namespace dynppr
