#include "dynppr/ppr_oracle.hpp"

#include <cmath>
#include <string>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  }
}

void check_source(const Graph& g, NodeId s) {
  if (!g.contains(s)) {
    throw Error(ErrorCode::kUnknownNode, "unknown source " + std::to_string(s));
  }
}

// y = P^T x with the dangling self-loop convention.
void apply_transition_transpose(const Graph& g, const std::vector<double>& x,
                                std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const double du = g.degree_of(u);
    if (x[u] == 0.0) continue;
    if (du == 0.0) {
      y[u] += x[u];
      continue;
    }
    const double share = x[u] / du;
    for (const Neighbor& nb : g.adjacency(u)) y[nb.node] += share * nb.weight;
  }
}

}  // namespace

DenseOracle::DenseOracle(const Graph& g, double alpha)
    : n_(g.node_count()), alpha_(alpha) {
  check_alpha(alpha);
  if (n_ > kMaxNodes) {
    throw Error(ErrorCode::kTooLarge, "dense oracle limited to " +
                                          std::to_string(kMaxNodes) + " nodes, got " +
                                          std::to_string(n_));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n_),
                                                static_cast<Eigen::Index>(n_));
  const double damp = 1.0 - alpha;
  for (NodeId u = 0; u < n_; ++u) {
    const double du = g.degree_of(u);
    if (du == 0.0) {
      m(u, u) -= damp;
      continue;
    }
    for (const Neighbor& nb : g.adjacency(u)) m(nb.node, u) -= damp * nb.weight / du;
  }
  lu_.compute(m);
  if (n_ > 0 && !(lu_.matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-300)) {
    throw Error(ErrorCode::kSingularSystem, "PPR system is singular");
  }
}

std::vector<double> DenseOracle::ppr(NodeId source) const {
  if (source >= n_) {
    throw Error(ErrorCode::kUnknownNode, "unknown source " + std::to_string(source));
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
  rhs(source) = alpha_;
  const Eigen::VectorXd x = lu_.solve(rhs);
  return std::vector<double>(x.data(), x.data() + x.size());
}

Eigen::MatrixXd DenseOracle::all() const {
  const auto n = static_cast<Eigen::Index>(n_);
  return lu_.solve(alpha_ * Eigen::MatrixXd::Identity(n, n));
}

std::vector<double> ppr_dense_oracle(const Graph& g, NodeId source, double alpha) {
  check_source(g, source);
  return DenseOracle(g, alpha).ppr(source);
}

PowerIterationResult ppr_power_iteration(const Graph& g, NodeId source, double alpha,
                                         double tol) {
  check_alpha(alpha);
  check_source(g, source);
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");

  const std::size_t n = g.node_count();
  PowerIterationResult res;
  std::vector<double> cur(n, 0.0), next(n, 0.0);
  cur[source] = alpha;
  while (true) {
    apply_transition_transpose(g, cur, next);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] *= (1.0 - alpha);
      if (i == source) next[i] += alpha;
      delta += std::abs(next[i] - cur[i]);
    }
    cur.swap(next);
    ++res.iterations;
    res.last_delta = delta;
    if (delta <= tol) break;
  }
  res.ppr = std::move(cur);
  return res;
}

}  // namespace dynppr
