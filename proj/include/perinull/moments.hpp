#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <mutex>
#include <span>

#include "perinull/tensor.hpp"

namespace perinull {

constexpr int kMaxMomentOrder = 12;

// (w - 1)!! pair partitions of w indices. Throws InvalidInput for odd or
// non-positive w.
std::int64_t pair_partition_count(int w);

// Component E[Q^{a1} ... Q^{aw}] of Q ~ N(0, covariance), by enumerating
// every pair partition of the index sequence (Isserlis). Odd w yields 0.
// Throws UnsupportedOrder for w > 12. When `terms` is non-null it receives the
// number of pair partitions visited.
double isserlis_moment(std::span<const int> indices, const Eigen::MatrixXd& covariance,
                       std::int64_t* terms = nullptr);

// Gaussian moment components of N(0, covariance), memoized per sorted
// multi-index. Safe for concurrent reads.
class MomentTable {
 public:
  explicit MomentTable(Eigen::MatrixXd covariance);

  int dim() const noexcept { return static_cast<int>(covariance_.rows()); }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }

  double moment(const IndexCounts& counts) const;
  double moment(std::span<const int> indices) const;

 private:
  Eigen::MatrixXd covariance_;
  mutable std::mutex mutex_;
  mutable std::map<IndexCounts, double> cache_;
};

}  // namespace perinull
