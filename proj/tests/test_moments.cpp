#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "perinull/core.hpp"
#include "perinull/moments.hpp"
#include "perinull/tensor.hpp"

using namespace perinull;

namespace {

Eigen::MatrixXd random_spd(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = z(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("identity covariance examples") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  CHECK(isserlis_moment(std::vector<int>{0, 1, 2, 0}, I) == 0.0);
  CHECK(isserlis_moment(std::vector<int>{0, 0, 1, 1}, I) == 1.0);
  CHECK(isserlis_moment(std::vector<int>{1, 1, 1, 1}, I) == 3.0);
  CHECK(isserlis_moment(std::vector<int>{2, 2, 2, 2, 2, 2}, I) == 15.0);
}

TEST_CASE("pair partition counts") {
  CHECK(pair_partition_count(2) == 1);
  CHECK(pair_partition_count(4) == 3);
  CHECK(pair_partition_count(6) == 15);
  CHECK(pair_partition_count(8) == 105);
  CHECK(pair_partition_count(10) == 945);
  CHECK(pair_partition_count(12) == 10395);
  CHECK_THROWS_AS(pair_partition_count(5), InvalidInput);
  CHECK_THROWS_AS(pair_partition_count(0), InvalidInput);
}

TEST_CASE("enumeration visits exactly (w-1)!! pair partitions") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  for (int w = 2; w <= 12; w += 2) {
    std::vector<int> idx(w);
    for (int i = 0; i < w; ++i) idx[i] = i % 2;
    std::int64_t terms = 0;
    isserlis_moment(idx, I, &terms);
    CHECK(terms == pair_partition_count(w));
  }
}

TEST_CASE("odd orders vanish and order above 12 is refused") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd S = random_spd(3, rng);
  for (int w : {1, 3, 5, 7, 9, 11}) {
    std::vector<int> idx(w);
    for (int i = 0; i < w; ++i) idx[i] = (i * 7) % 3;
    CHECK(isserlis_moment(idx, S) == 0.0);
  }
  CHECK_THROWS_AS(isserlis_moment(std::vector<int>(14, 0), S), UnsupportedOrder);
}

TEST_CASE("fourth moment is the three-term pair sum") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd S = random_spd(3, rng);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          const double want = S(a, b) * S(c, d) + S(a, c) * S(b, d) + S(a, d) * S(b, c);
          CHECK(isserlis_moment(std::vector<int>{a, b, c, d}, S) == doctest::Approx(want).epsilon(1e-14));
        }
}

TEST_CASE("one-dimensional moments are sigma^w (w-1)!!") {
  Eigen::MatrixXd S(1, 1);
  S(0, 0) = 1.7;
  for (int w = 2; w <= 12; w += 2) {
    const double want = std::pow(1.7, w / 2) * static_cast<double>(pair_partition_count(w));
    CHECK(isserlis_moment(std::vector<int>(w, 0), S) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("diagonal covariance: any index with odd multiplicity gives zero") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D.diagonal() << 0.5, 2.0, 3.0;
  CHECK(isserlis_moment(std::vector<int>{0, 0, 0, 1, 1, 2}, D) == 0.0);
  CHECK(isserlis_moment(std::vector<int>{0, 1, 1, 1, 2, 2, 2, 0}, D) == 0.0);
  CHECK(isserlis_moment(std::vector<int>{0, 0, 1, 1, 2, 2}, D) == doctest::Approx(3.0));
}

TEST_CASE("permutation invariance") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd S = random_spd(3, rng);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> idx(8);
    for (int& i : idx) i = pick(rng);
    const double base = isserlis_moment(idx, S);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(idx.begin(), idx.end(), rng);
      CHECK(isserlis_moment(idx, S) == doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("memoized table agrees with direct enumeration") {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd S = random_spd(2, rng);
  const MomentTable table(S);
  for (const IndexCounts& c : all_counts(2, 10))
    CHECK(table.moment(c) == doctest::Approx(isserlis_moment(expand(c), S)).epsilon(1e-14));
}

TEST_CASE("order-8 moment matches a 10^7-draw Monte Carlo estimate") {
  std::mt19937_64 rng(2024);
  const Eigen::MatrixXd S = random_spd(2, rng);
  const Eigen::MatrixXd L = S.llt().matrixL();
  const std::vector<int> idx{0, 0, 0, 1, 1, 1, 1, 1};  // E[Q1^3 Q2^5]
  const double exact = isserlis_moment(idx, S);
  std::normal_distribution<double> z;
  const long draws = 10'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < draws; ++i) {
    const double z1 = z(rng), z2 = z(rng);
    const double q1 = L(0, 0) * z1;
    const double q2 = L(1, 0) * z1 + L(1, 1) * z2;
    const double v = q1 * q1 * q1 * std::pow(q2, 5);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CAPTURE(exact);
  CAPTURE(mean);
  CAPTURE(se);
  CHECK(std::abs(mean - exact) < 4.0 * se);
}

TEST_CASE("symmetric tensor storage") {
  SymmetricTensor t(2, 3);
  t.set(std::vector<int>{1, 0, 0}, 2.5);
  CHECK(t(std::vector<int>{0, 1, 0}) == 2.5);
  CHECK(t(std::vector<int>{0, 0, 1}) == 2.5);
  CHECK(multiplicity(IndexCounts{2, 1, 0}) == 3.0);
  CHECK(multiplicity(IndexCounts{2, 2, 2}) == 90.0);
  CHECK(all_counts(2, 12).size() == 13);
  CHECK(all_counts(3, 4).size() == 15);
  const std::vector<int> perm{1, 0};
  const SymmetricTensor p = t.permuted(perm);
  CHECK(p(std::vector<int>{0, 1, 1}) == 2.5);
  CHECK(p(std::vector<int>{0, 0, 1}) == 0.0);
}

}
