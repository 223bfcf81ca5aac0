#pragma once

// Dense arrays of jets indexed by small integers, one extent per slot.

#include <algorithm>
#include <array>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "egjms/error.hpp"
#include "egjms/jet.hpp"

namespace egjms {

class JetTensor {
 public:
  JetTensor() = default;
  JetTensor(std::vector<int> extents, const Jet& fill) : extents_(std::move(extents)) {
    std::size_t n = 1;
    for (int e : extents_) n *= static_cast<std::size_t>(e);
    data_.assign(n, fill);
  }
  /// Every slot has the same extent.
  JetTensor(int rank, int extent, const Jet& fill)
      : JetTensor(std::vector<int>(static_cast<std::size_t>(rank), extent), fill) {}

  int rank() const { return static_cast<int>(extents_.size()); }
  int extent(int slot) const { return extents_[slot]; }
  const std::vector<int>& extents() const { return extents_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  template <typename... I>
  Jet& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... I>
  const Jet& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  Jet& at(std::size_t flat) { return data_[flat]; }
  const Jet& at(std::size_t flat) const { return data_[flat]; }

  /// Multi-index of a flat position, row-major.
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(extents_.size());
    for (int s = rank() - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(flat % static_cast<std::size_t>(extents_[s]));
      flat /= static_cast<std::size_t>(extents_[s]);
    }
    return idx;
  }

  std::size_t offset(std::initializer_list<int> idx) const {
    if (idx.size() != extents_.size()) throw OrderError("tensor rank mismatch");
    std::size_t off = 0;
    int s = 0;
    for (int i : idx) {
      if (i < 0 || i >= extents_[s]) throw OrderError("tensor index out of range");
      off = off * static_cast<std::size_t>(extents_[s]) + static_cast<std::size_t>(i);
      ++s;
    }
    return off;
  }

  std::size_t offset(const std::vector<int>& idx) const {
    if (idx.size() != extents_.size()) throw OrderError("tensor rank mismatch");
    std::size_t off = 0;
    for (std::size_t s = 0; s < idx.size(); ++s) {
      if (idx[s] < 0 || idx[s] >= extents_[s]) throw OrderError("tensor index out of range");
      off = off * static_cast<std::size_t>(extents_[s]) + static_cast<std::size_t>(idx[s]);
    }
    return off;
  }

  /// Lowest jet order over all entries.
  int order() const {
    int m = data_.empty() ? 0 : data_[0].order();
    for (const auto& j : data_) m = std::min(m, j.order());
    return m;
  }

 private:
  std::vector<int> extents_;
  std::vector<Jet> data_;
};

}  // namespace egjms
