#include "relkit/sparse.hpp"

#include "relkit/atom.hpp"

namespace relkit {

double SparseFeatureVector::dot(const SparseFeatureVector& other) const {
  const Map& a = entries_.size() <= other.entries_.size() ? entries_
                                                          : other.entries_;
  const Map& b = entries_.size() <= other.entries_.size() ? other.entries_
                                                          : entries_;
  double sum = 0.0;
  for (const auto& [index, value] : a) {
    auto it = b.find(index);
    if (it != b.end()) sum += value * it->second;
  }
  return sum;
}

double SparseFeatureVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& [index, value] : entries_) sum += value * value;
  return sum;
}

void SparseFeatureVector::scale(double factor) {
  if (factor == 0.0) {
    entries_.clear();
    return;
  }
  for (auto& [index, value] : entries_) value *= factor;
}

void SparseFeatureVector::axpy(double factor, const SparseFeatureVector& other) {
  if (factor == 0.0) return;
  for (const auto& [index, value] : other.entries_) add(index, factor * value);
}

std::string SparseFeatureVector::to_text_line(const std::string& label) const {
  std::string out = label;
  for (const auto& [index, value] : entries_) {
    out += ' ';
    out += std::to_string(index);
    out += ':';
    out += format_number(value);
  }
  return out;
}

}  // namespace relkit
