#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dynppr/graph_store.hpp"

namespace dynppr {

// Ground-truth PPR for small graphs, used by tests and `compare`.
//
// Solves (I - (1-alpha) P^T) pi = alpha 1_s with P = D^-1 A. A dangling node
// (d = 0) is treated as carrying a self-loop, so an isolated source gets
// pi_s = 1_s.
class DenseOracle {
 public:
  static constexpr std::size_t kMaxNodes = 2000;

  // Throws Error(kTooLarge) above kMaxNodes, Error(kInvalidArgument) for
  // alpha outside (0,1].
  DenseOracle(const Graph& g, double alpha);

  std::size_t size() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }

  std::vector<double> ppr(NodeId source) const;
  // Column v holds pi_v.
  Eigen::MatrixXd all() const;

 private:
  std::size_t n_;
  double alpha_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

std::vector<double> ppr_dense_oracle(const Graph& g, NodeId source, double alpha);

struct PowerIterationResult {
  std::vector<double> ppr;
  std::size_t iterations = 0;
  double last_delta = 0.0;
};

// pi^(t) = (1-alpha) P^T pi^(t-1) + alpha 1_s starting from alpha 1_s, until
// the l1 change between consecutive iterates is <= tol.
PowerIterationResult ppr_power_iteration(const Graph& g, NodeId source, double alpha,
                                         double tol);

}  // namespace dynppr
