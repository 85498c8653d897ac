#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace relkit {

/// Sparse real vector over 64-bit feature indices. Zero entries are never
/// stored; the ordered map keeps exports and serialization deterministic.
class SparseFeatureVector {
 public:
  using Map = std::map<std::uint64_t, double>;

  void add(std::uint64_t index, double value) {
    if (value == 0.0) return;
    auto [it, inserted] = entries_.emplace(index, value);
    if (!inserted) {
      it->second += value;
      if (it->second == 0.0) entries_.erase(it);
    }
  }
  void set(std::uint64_t index, double value) {
    if (value == 0.0)
      entries_.erase(index);
    else
      entries_[index] = value;
  }
  double get(std::uint64_t index) const {
    auto it = entries_.find(index);
    return it == entries_.end() ? 0.0 : it->second;
  }

  double dot(const SparseFeatureVector& other) const;
  double squared_norm() const;
  void scale(double factor);
  /// this += factor * other
  void axpy(double factor, const SparseFeatureVector& other);
  void merge(const SparseFeatureVector& other) { axpy(1.0, other); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }
  Map& mutable_entries() { return entries_; }
  void clear() { entries_.clear(); }

  /// `<label> <index>:<value> ...` with strictly increasing indices, the
  /// common sparse-vector text format.
  std::string to_text_line(const std::string& label) const;

 private:
  Map entries_;
};

}  // namespace relkit
