#pragma once

#include <array>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace perinull {

constexpr int kMaxDim = 3;

// Multiplicities of each coordinate in a multi-index; equivalent to the sorted
// multi-index. {2, 1, 0} stands for (1, 1, 2) in 1-based notation.
using IndexCounts = std::array<int, kMaxDim>;

IndexCounts counts_of(std::span<const int> indices);
std::vector<int> expand(const IndexCounts& counts);

// Number of index tuples sharing the given counts: order! / prod(counts!).
double multiplicity(const IndexCounts& counts);

// All count vectors of a given total order over `dim` coordinates.
std::vector<IndexCounts> all_counts(int dim, int order);

// Fully symmetric array of partial derivatives. Storage holds one value per
// sorted multi-index; every permutation of the indices reads the same entry.
class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  SymmetricTensor(int dim, int order);

  // Builds each distinct entry from its count vector.
  static SymmetricTensor from_counts(int dim, int order,
                                     const std::function<double(const IndexCounts&)>& entry);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }

  double operator()(std::span<const int> indices) const;
  double at(const IndexCounts& counts) const;
  void set(std::span<const int> indices, double value);
  void set(const IndexCounts& counts, double value);

  const std::map<IndexCounts, double>& entries() const noexcept { return entries_; }

  // Same tensor with coordinates relabeled: new coordinate i is old perm[i].
  SymmetricTensor permuted(std::span<const int> perm) const;

 private:
  int dim_ = 0;
  int order_ = 0;
  std::map<IndexCounts, double> entries_;
};

}  // namespace perinull
