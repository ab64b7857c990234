#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dynppr/flat_map.hpp"
#include "dynppr/types.hpp"

namespace dynppr {

// MurmurHash3 64-bit finalizer.
constexpr std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

// Signed feature-hashing kernel H: R^n -> R^dim.
//
// Frozen definition (do not change; outputs are compared across runs):
//   key    = fmix64(seed + 0x9e3779b97f4a7c15)
//   h(id)  = fmix64(fmix64(id) ^ key)
//   bucket = h(id) mod dim
//   sign   = +1 if bit 63 of h(id) is 0, else -1
class HashKernel {
 public:
  HashKernel(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t hash(NodeId id) const noexcept { return fmix64(fmix64(id) ^ key_); }
  std::size_t bucket(NodeId id) const noexcept { return hash(id) % dim_; }
  double sign(NodeId id) const noexcept { return (hash(id) >> 63) ? -1.0 : 1.0; }

  // H(x)_j = sum over i with bucket(i) = j of sign(i) * x_i.
  std::vector<double> apply(const SparseVector& x) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::uint64_t key_;
};

// <H(x), H(y)>; its expectation over seeds is <x, y>.
double inner_product_estimate(const SparseVector& x, const SparseVector& y,
                              const HashKernel& kernel);

struct HashAuditResult {
  std::size_t ids = 0;
  double chi_square = 0.0;
  double chi_square_critical = 0.0;
  double chi_square_p_value = 0.0;
  bool buckets_uniform = false;
  std::size_t positive_signs = 0;
  double sign_z = 0.0;
  double sign_z_critical = 0.0;
  bool signs_balanced = false;

  bool passed() const noexcept { return buckets_uniform && signs_balanced; }
};

// Chi-square test of bucket uniformity and a two-sided binomial (normal
// approximation) test of sign balance over ids 0..ids-1.
HashAuditResult audit_hash_kernel(const HashKernel& kernel, std::size_t ids,
                                  double significance = 0.001);

}  // namespace dynppr
