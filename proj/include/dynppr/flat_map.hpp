#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "dynppr/types.hpp"

namespace dynppr {

// Open-addressing hash map keyed by node id. Linear probing with
// backward-shift deletion, so there are no tombstones and iteration order
// is a pure function of the insertion/erase history (no per-process seed).
template <typename V>
class FlatMap {
 public:
  struct Slot {
    NodeId key = kInvalidNode;
    V value{};
  };

  FlatMap() = default;
  explicit FlatMap(std::size_t expected) { reserve(expected); }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  void clear() {
    slots_.clear();
    size_ = 0;
  }

  void reserve(std::size_t expected) {
    std::size_t cap = 8;
    while (cap * 7 < expected * 10) cap <<= 1;
    if (cap > slots_.size()) rehash(cap);
  }

  const V* find(NodeId key) const {
    if (slots_.empty()) return nullptr;
    std::size_t i = home(key);
    while (true) {
      const Slot& s = slots_[i];
      if (s.key == key) return &s.value;
      if (s.key == kInvalidNode) return nullptr;
      i = (i + 1) & mask();
    }
  }

  V* find(NodeId key) {
    return const_cast<V*>(std::as_const(*this).find(key));
  }

  bool contains(NodeId key) const { return find(key) != nullptr; }

  // Returns a reference to the value for key, default-inserting if absent.
  V& operator[](NodeId key) {
    if ((size_ + 1) * 10 > slots_.size() * 7) {
      rehash(slots_.empty() ? 8 : slots_.size() * 2);
    }
    std::size_t i = home(key);
    while (true) {
      Slot& s = slots_[i];
      if (s.key == key) return s.value;
      if (s.key == kInvalidNode) {
        s.key = key;
        s.value = V{};
        ++size_;
        return s.value;
      }
      i = (i + 1) & mask();
    }
  }

  bool erase(NodeId key) {
    if (slots_.empty()) return false;
    std::size_t i = home(key);
    while (true) {
      if (slots_[i].key == key) break;
      if (slots_[i].key == kInvalidNode) return false;
      i = (i + 1) & mask();
    }
    // Backward-shift: pull later entries of the probe run into the hole.
    std::size_t hole = i;
    std::size_t j = i;
    while (true) {
      j = (j + 1) & mask();
      if (slots_[j].key == kInvalidNode) break;
      const std::size_t h = home(slots_[j].key);
      const bool movable = (hole <= j) ? (h <= hole || h > j) : (h <= hole && h > j);
      if (movable) {
        slots_[hole] = std::move(slots_[j]);
        hole = j;
      }
    }
    slots_[hole].key = kInvalidNode;
    slots_[hole].value = V{};
    --size_;
    return true;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (const Slot& s : slots_) {
      if (s.key != kInvalidNode) f(s.key, s.value);
    }
  }

  std::vector<NodeId> keys() const {
    std::vector<NodeId> out;
    out.reserve(size_);
    for_each([&](NodeId k, const V&) { out.push_back(k); });
    return out;
  }

  std::size_t capacity() const noexcept { return slots_.size(); }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
  }

  std::size_t mask() const noexcept { return slots_.size() - 1; }
  std::size_t home(NodeId key) const noexcept { return mix(key) & mask(); }

  void rehash(std::size_t cap) {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(cap, Slot{});
    size_ = 0;
    for (Slot& s : old) {
      if (s.key == kInvalidNode) continue;
      std::size_t i = home(s.key);
      while (slots_[i].key != kInvalidNode) i = (i + 1) & mask();
      slots_[i] = std::move(s);
      ++size_;
    }
  }

  std::vector<Slot> slots_;
  std::size_t size_ = 0;
};

// Sparse real vector over node ids. Entries whose magnitude falls below
// kDropThreshold are removed, so explicit zeros are never stored.
class SparseVector {
 public:
  static constexpr double kDropThreshold = 1e-15;

  SparseVector() = default;

  std::size_t nnz() const noexcept { return map_.size(); }
  bool empty() const noexcept { return map_.empty(); }

  double get(NodeId i) const {
    const double* v = map_.find(i);
    return v ? *v : 0.0;
  }

  void set(NodeId i, double value) {
    if (value < kDropThreshold && value > -kDropThreshold) {
      map_.erase(i);
    } else {
      map_[i] = value;
    }
  }

  // Adds delta to entry i and returns the new value (0 if dropped).
  double add(NodeId i, double delta) {
    double& slot = map_[i];
    slot += delta;
    if (slot < kDropThreshold && slot > -kDropThreshold) {
      map_.erase(i);
      return 0.0;
    }
    return slot;
  }

  void erase(NodeId i) { map_.erase(i); }
  void clear() { map_.clear(); }

  template <typename F>
  void for_each(F&& f) const {
    map_.for_each(std::forward<F>(f));
  }

  std::vector<NodeId> support() const { return map_.keys(); }

  double l1_norm() const {
    double s = 0.0;
    map_.for_each([&](NodeId, double v) { s += v < 0 ? -v : v; });
    return s;
  }

  double sum() const {
    double s = 0.0;
    map_.for_each([&](NodeId, double v) { s += v; });
    return s;
  }

  std::vector<double> to_dense(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    map_.for_each([&](NodeId k, double v) {
      if (k < n) out[k] = v;
    });
    return out;
  }

  static SparseVector unit(NodeId i) {
    SparseVector v;
    v.set(i, 1.0);
    return v;
  }

 private:
  FlatMap<double> map_;
};

}  // namespace dynppr
