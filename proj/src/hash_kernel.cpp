#include "dynppr/hash_kernel.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "dynppr/errors.hpp"

namespace dynppr {

HashKernel::HashKernel(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed), key_(fmix64(seed + 0x9e3779b97f4a7c15ULL)) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "hash kernel dimension must be >= 1");
}

std::vector<double> HashKernel::apply(const SparseVector& x) const {
  std::vector<double> out(dim_, 0.0);
  x.for_each([&](NodeId i, double v) { out[bucket(i)] += sign(i) * v; });
  return out;
}

double inner_product_estimate(const SparseVector& x, const SparseVector& y,
                              const HashKernel& kernel) {
  if (x.empty() || y.empty()) return 0.0;
  const std::vector<double> hx = kernel.apply(x);
  const std::vector<double> hy = kernel.apply(y);
  double dot = 0.0;
  for (std::size_t j = 0; j < hx.size(); ++j) dot += hx[j] * hy[j];
  return dot;
}

HashAuditResult audit_hash_kernel(const HashKernel& kernel, std::size_t ids,
                                  double significance) {
  if (ids == 0) throw Error(ErrorCode::kInvalidArgument, "audit needs at least one id");
  HashAuditResult res;
  res.ids = ids;
  std::vector<std::size_t> counts(kernel.dim(), 0);
  for (std::size_t i = 0; i < ids; ++i) {
    const auto id = static_cast<NodeId>(i);
    ++counts[kernel.bucket(id)];
    if (kernel.sign(id) > 0) ++res.positive_signs;
  }

  const double expected = static_cast<double>(ids) / static_cast<double>(kernel.dim());
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    res.chi_square += diff * diff / expected;
  }
  if (kernel.dim() > 1) {
    const boost::math::chi_squared_distribution<double> chi2(
        static_cast<double>(kernel.dim() - 1));
    res.chi_square_critical = boost::math::quantile(boost::math::complement(chi2, significance));
    res.chi_square_p_value = boost::math::cdf(boost::math::complement(chi2, res.chi_square));
    res.buckets_uniform = res.chi_square <= res.chi_square_critical;
  } else {
    res.chi_square_p_value = 1.0;
    res.buckets_uniform = true;
  }

  const double n = static_cast<double>(ids);
  res.sign_z = (static_cast<double>(res.positive_signs) - 0.5 * n) / std::sqrt(0.25 * n);
  const boost::math::normal_distribution<double> normal;
  res.sign_z_critical = boost::math::quantile(boost::math::complement(normal, significance / 2));
  res.signs_balanced = std::abs(res.sign_z) <= res.sign_z_critical;
  return res;
}

}  // namespace dynppr
