#include "perinull/moments.hpp"

#include <array>
#include <vector>

#include "perinull/core.hpp"

namespace perinull {

std::int64_t pair_partition_count(int w) {
  if (w < 2 || w % 2 != 0) throw InvalidInput("pair partitions need an even order >= 2");
  std::int64_t out = 1;
  for (int k = w - 1; k > 1; k -= 2) out *= k;
  return out;
}

namespace {

// Pairs the first unused slot with each later unused slot in turn.
double sum_pairings(const std::array<int, kMaxMomentOrder>& idx, int w, unsigned used,
                    const Eigen::MatrixXd& cov, std::int64_t& terms) {
  int first = 0;
  while (first < w && (used & (1u << first))) ++first;
  if (first == w) {
    ++terms;
    return 1.0;
  }
  double total = 0.0;
  for (int j = first + 1; j < w; ++j) {
    if (used & (1u << j)) continue;
    const double c = cov(idx[first], idx[j]);
    const unsigned next = used | (1u << first) | (1u << j);
    total += c * sum_pairings(idx, w, next, cov, terms);
  }
  return total;
}

double isserlis_impl(std::span<const int> indices, const Eigen::MatrixXd& cov, std::int64_t& terms) {
  const int w = static_cast<int>(indices.size());
  std::array<int, kMaxMomentOrder> idx{};
  for (int i = 0; i < w; ++i) {
    if (indices[i] < 0 || indices[i] >= cov.rows()) throw InvalidInput("moment index out of range");
    idx[i] = indices[i];
  }
  return sum_pairings(idx, w, 0u, cov, terms);
}

void check_covariance(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() < 1 || cov.rows() > kMaxDim) {
    throw InvalidInput("covariance must be a square matrix of dimension 1..3");
  }
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw InvalidInput("covariance must be symmetric");
}

}  // namespace

double isserlis_moment(std::span<const int> indices, const Eigen::MatrixXd& covariance,
                       std::int64_t* terms) {
  check_covariance(covariance);
  const int w = static_cast<int>(indices.size());
  if (w > kMaxMomentOrder) throw UnsupportedOrder("Gaussian moments are supported up to order 12");
  std::int64_t count = 0;
  double value = 0.0;
  if (w % 2 == 0 && w > 0) value = isserlis_impl(indices, covariance, count);
  if (w == 0) value = 1.0;
  if (terms) *terms = count;
  return value;
}

MomentTable::MomentTable(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
  check_covariance(covariance_);
}

double MomentTable::moment(const IndexCounts& counts) const {
  int w = 0;
  for (int c : counts) w += c;
  if (w % 2 != 0) return 0.0;
  if (w > kMaxMomentOrder) throw UnsupportedOrder("Gaussian moments are supported up to order 12");
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(counts);
    if (it != cache_.end()) return it->second;
  }
  const std::vector<int> idx = expand(counts);
  const double value = isserlis_moment(idx, covariance_);
  std::lock_guard lock(mutex_);
  cache_.emplace(counts, value);
  return value;
}

double MomentTable::moment(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) > kMaxMomentOrder) {
    throw UnsupportedOrder("Gaussian moments are supported up to order 12");
  }
  return moment(counts_of(indices));
}

}  // namespace perinull
