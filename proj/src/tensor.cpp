#include "perinull/tensor.hpp"

#include <cmath>

#include "perinull/core.hpp"

namespace perinull {

IndexCounts counts_of(std::span<const int> indices) {
  IndexCounts c{};
  for (int i : indices) {
    if (i < 0 || i >= kMaxDim) throw InvalidInput("tensor index out of range");
    ++c[i];
  }
  return c;
}

std::vector<int> expand(const IndexCounts& counts) {
  std::vector<int> out;
  for (int i = 0; i < kMaxDim; ++i) out.insert(out.end(), counts[i], i);
  return out;
}

double multiplicity(const IndexCounts& counts) {
  int total = 0;
  double denom = 1.0;
  for (int c : counts) {
    total += c;
    denom *= std::tgamma(c + 1.0);
  }
  return std::tgamma(total + 1.0) / denom;
}

std::vector<IndexCounts> all_counts(int dim, int order) {
  std::vector<IndexCounts> out;
  if (dim == 1) {
    out.push_back({order, 0, 0});
  } else if (dim == 2) {
    for (int i = order; i >= 0; --i) out.push_back({i, order - i, 0});
  } else {
    for (int i = order; i >= 0; --i)
      for (int j = order - i; j >= 0; --j) out.push_back({i, j, order - i - j});
  }
  return out;
}

SymmetricTensor::SymmetricTensor(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("tensor dimension must be 1, 2 or 3");
  if (order < 0) throw InvalidInput("tensor order must be nonnegative");
  for (const IndexCounts& c : all_counts(dim, order)) entries_[c] = 0.0;
}

SymmetricTensor SymmetricTensor::from_counts(
    int dim, int order, const std::function<double(const IndexCounts&)>& entry) {
  SymmetricTensor t(dim, order);
  for (auto& [c, v] : t.entries_) v = entry(c);
  return t;
}

double SymmetricTensor::at(const IndexCounts& counts) const {
  auto it = entries_.find(counts);
  if (it == entries_.end()) throw InvalidInput("multi-index does not match tensor shape");
  return it->second;
}

double SymmetricTensor::operator()(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != order_) throw InvalidInput("wrong number of tensor indices");
  return at(counts_of(indices));
}

void SymmetricTensor::set(const IndexCounts& counts, double value) {
  auto it = entries_.find(counts);
  if (it == entries_.end()) throw InvalidInput("multi-index does not match tensor shape");
  it->second = value;
}

void SymmetricTensor::set(std::span<const int> indices, double value) {
  if (static_cast<int>(indices.size()) != order_) throw InvalidInput("wrong number of tensor indices");
  set(counts_of(indices), value);
}

SymmetricTensor SymmetricTensor::permuted(std::span<const int> perm) const {
  SymmetricTensor out(dim_, order_);
  for (const auto& [c, v] : entries_) {
    IndexCounts moved{};
    for (int i = 0; i < dim_; ++i) moved[i] = c[perm[i]];
    out.entries_[moved] = v;
  }
  return out;
}

}  // namespace perinull
