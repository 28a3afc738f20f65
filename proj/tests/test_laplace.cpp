#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "perinull/bf_engine.hpp"
#include "perinull/core.hpp"
#include "perinull/laplace.hpp"
#include "perinull/laplace_models.hpp"

using namespace perinull;

namespace {

LaplaceResult run(const LaplaceModel& m) { return laplace_marginal(m.likelihood, m.prior, m.mle, m.n); }

TensorCoeffs coeffs_of(const LaplaceModel& m) { return make_coeffs(m.likelihood, m.prior, m.mle); }

// Scaled residual of the leading term, n (exact / leading - 1) = C1 + C2 / n + ...
double first_residual(const LaplaceModel& m) {
  return m.n * std::expm1(m.exact_log_marginal - run(m).leading);
}

// n^2 (exact / leading - 1 - C1 / n) = C2 + O(1/n)
double second_residual(const LaplaceModel& m, double c1) {
  return m.n * m.n * (std::expm1(m.exact_log_marginal - run(m).leading) - c1 / m.n);
}

// Quadratic h with information `info`, polynomial prior of degree <= 4 in
// `dim` coordinates. The Laplace expansion of this integral terminates.
TensorCoeffs quadratic_model(const Eigen::MatrixXd& info, double p0, const std::vector<double>& p2diag,
                             double p4_0000) {
  const int dim = static_cast<int>(info.rows());
  TensorCoeffs c;
  c.dim = dim;
  c.mle.assign(dim, 0.0);
  c.h_derivs[2] = SymmetricTensor::from_counts(dim, 2, [&](const IndexCounts& k) {
    const std::vector<int> idx = expand(k);
    return info(idx[0], idx[1]);
  });
  for (int o = 3; o <= 6; ++o) c.h_derivs[o] = SymmetricTensor(dim, o);
  c.prior_value = p0;
  c.prior_derivs[1] = SymmetricTensor::from_counts(dim, 1, [](const IndexCounts&) { return 0.3; });
  c.prior_derivs[2] = SymmetricTensor::from_counts(dim, 2, [&](const IndexCounts& k) {
    for (int i = 0; i < dim; ++i)
      if (k[i] == 2) return p2diag[i];
    return 0.0;
  });
  c.prior_derivs[3] = SymmetricTensor::from_counts(dim, 3, [](const IndexCounts& k) { return k[0] == 3 ? 0.7 : 0.0; });
  c.prior_derivs[4] = SymmetricTensor::from_counts(dim, 4, [&](const IndexCounts& k) { return k[0] == 4 ? p4_0000 : 0.0; });
  return c;
}

}  // namespace

TEST_SUITE("laplace") {

TEST_CASE("Gaussian integrand with flat prior: both corrections vanish") {
  for (int dim = 1; dim <= 3; ++dim) {
    Eigen::MatrixXd info = Eigen::MatrixXd::Identity(dim, dim) * 2.0;
    if (dim > 1) info(0, 1) = info(1, 0) = 0.4;
    TensorCoeffs c = quadratic_model(info, 1.5, std::vector<double>(dim, 0.0), 0.0);
    for (int o = 1; o <= 4; ++o) c.prior_derivs[o] = SymmetricTensor(dim, o);
    CHECK(laplace_c1(c) == 0.0);
    CHECK(laplace_c2(c) == 0.0);
  }
}

TEST_CASE("polynomial prior: corrections reproduce the Gaussian moments exactly") {
  // With quadratic h, int exp(-n Q/2) pi = leading * [1 + tr(S P2)/(2 n pi0) + E[P4 Q^4]/(24 n^2 pi0)].
  for (int dim = 1; dim <= 3; ++dim) {
    Eigen::MatrixXd info = Eigen::MatrixXd::Identity(dim, dim) * 2.0;
    if (dim > 1) info(0, 1) = info(1, 0) = 0.4;
    const std::vector<double> p2{0.9, -0.2, 0.5};
    const TensorCoeffs c = quadratic_model(info, 1.5, p2, 1.1);
    const Eigen::MatrixXd S = info.inverse();
    double tr = 0.0;
    for (int i = 0; i < dim; ++i) tr += S(i, i) * p2[i];
    CHECK(laplace_c1(c) == doctest::Approx(tr / (2.0 * 1.5)).epsilon(1e-13));
    CHECK(laplace_c2(c) == doctest::Approx(1.1 * 3.0 * S(0, 0) * S(0, 0) / (24.0 * 1.5)).epsilon(1e-13));
  }
}

TEST_CASE("quadratic h and constant prior: leading term is exact in dims 1 to 3") {
  for (int dim = 1; dim <= 3; ++dim) {
    Eigen::MatrixXd info = Eigen::MatrixXd::Identity(dim, dim) * 1.3;
    if (dim > 1) info(0, 1) = info(1, 0) = -0.3;
    const double n = 7.0, loglik = -4.2, prior = 0.8;
    LikelihoodOracle lik = [&](std::span<const double>) {
      LikelihoodExpansion e;
      e.log_likelihood = loglik;
      e.h_derivs[2] = SymmetricTensor::from_counts(dim, 2, [&](const IndexCounts& k) {
        const std::vector<int> idx = expand(k);
        return info(idx[0], idx[1]);
      });
      for (int o = 3; o <= 6; ++o) e.h_derivs[o] = SymmetricTensor(dim, o);
      return e;
    };
    PriorOracle pr = [&](std::span<const double>) {
      PriorExpansion e;
      e.value = prior;
      for (int o = 1; o <= 4; ++o) e.derivs[o] = SymmetricTensor(dim, o);
      return e;
    };
    const std::vector<double> mle(dim, 0.25);
    const LaplaceResult r = laplace_marginal(lik, pr, mle, n);
    // int exp(loglik - n (x-m)' I (x-m) / 2) prior dx
    const double exact = loglik + std::log(prior) + 0.5 * dim * std::log(2.0 * std::numbers::pi / n) -
                         0.5 * std::log(info.determinant());
    CHECK(r.c1 == 0.0);
    CHECK(r.c2 == 0.0);
    CHECK(r.leading == doctest::Approx(exact).epsilon(1e-14));
    CHECK(r.with_c2 == doctest::Approx(exact).epsilon(1e-14));
  }
}

TEST_CASE("corrections are invariant under relabeling coordinates") {
  const LaplaceModel m = ttest_model(TTestPrior::Alt, 0.7, 200, 0.1, 1.2);
  const TensorCoeffs c = coeffs_of(m);
  const std::vector<int> swap{1, 0};
  const TensorCoeffs p = c.permuted(swap);
  CHECK(laplace_c1(p) == doctest::Approx(laplace_c1(c)).epsilon(1e-12));
  CHECK(laplace_c2(p) == doctest::Approx(laplace_c2(c)).epsilon(1e-12));

  // A generic three-dimensional tensor set, all 6 relabelings.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TensorCoeffs g;
  g.dim = 3;
  g.mle = {0.0, 0.0, 0.0};
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = u(rng);
  const Eigen::Matrix3d info = a * a.transpose() + Eigen::Matrix3d::Identity();
  g.h_derivs[2] = SymmetricTensor::from_counts(3, 2, [&](const IndexCounts& k) {
    const std::vector<int> idx = expand(k);
    return info(idx[0], idx[1]);
  });
  for (int o = 3; o <= 6; ++o) g.h_derivs[o] = SymmetricTensor::from_counts(3, o, [&](const IndexCounts&) { return u(rng); });
  g.prior_value = 2.0;
  for (int o = 1; o <= 4; ++o) g.prior_derivs[o] = SymmetricTensor::from_counts(3, o, [&](const IndexCounts&) { return u(rng); });
  const double c1 = laplace_c1(g), c2 = laplace_c2(g);
  std::vector<int> perm{0, 1, 2};
  while (std::next_permutation(perm.begin(), perm.end())) {
    const TensorCoeffs q = g.permuted(perm);
    CHECK(laplace_c1(q) == doctest::Approx(c1).epsilon(1e-12));
    CHECK(laplace_c2(q) == doctest::Approx(c2).epsilon(1e-12));
  }
}

TEST_CASE("non-SPD information and missing orders are rejected") {
  TensorCoeffs c = quadratic_model(Eigen::MatrixXd::Identity(2, 2), 1.0, {0.0, 0.0}, 0.0);
  c.h_derivs[2]->set(IndexCounts{1, 1, 0}, 3.0);  // off-diagonal 3 with unit diagonal
  CHECK_THROWS_AS(laplace_c1(c), InvalidInput);
  CHECK_THROWS_AS(laplace_c2(c), InvalidInput);
  TensorCoeffs d = quadratic_model(Eigen::MatrixXd::Identity(1, 1), 1.0, {0.0}, 0.0);
  d.h_derivs[5].reset();
  CHECK_NOTHROW(laplace_c1(d));
  CHECK_THROWS_AS(laplace_c2(d), InvalidInput);
}

TEST_CASE("conjugate Gaussian: with_c2 matches the closed form for n >= 10") {
  for (double n : {10.0, 20.0, 50.0, 200.0, 1000.0}) {
    const LaplaceModel m = conjugate_gaussian_model(n, 0.3, 1.0, 0.0, 20.0);
    const LaplaceResult r = run(m);
    CAPTURE(n);
    CHECK(std::abs(r.with_c2 - m.exact_log_marginal) <= 1e-10);
  }
}

TEST_CASE("conjugate Gaussian: truncation levels are ordered from some n0 <= 20 on") {
  // Find the last n at which the ordering fails; it must be below 20.
  double last_bad = 0.0;
  for (double n = 2.0; n <= 400.0; n += 1.0) {
    const LaplaceModel m = conjugate_gaussian_model(n, 0.8, 1.5, -0.4, 0.9);
    const LaplaceResult r = run(m);
    const double e0 = std::abs(r.leading - m.exact_log_marginal);
    const double e1 = std::abs(r.with_c1 - m.exact_log_marginal);
    const double e2 = std::abs(r.with_c2 - m.exact_log_marginal);
    if (!(e2 <= e1 && e1 <= e0)) last_bad = n;
  }
  CHECK(last_bad < 20.0);
}

TEST_CASE("Beta-Bernoulli at n = 50: successive truncations strictly improve") {
  for (double k : {10.0, 23.0, 37.0}) {
    const LaplaceModel m = beta_bernoulli_model(50.0, k, 2.0, 3.0);
    const LaplaceResult r = run(m);
    const double e0 = std::abs(r.leading - m.exact_log_marginal);
    const double e1 = std::abs(r.with_c1 - m.exact_log_marginal);
    const double e2 = std::abs(r.with_c2 - m.exact_log_marginal);
    CAPTURE(k);
    CHECK(e1 < e0);
    CHECK(e2 < e1);
  }
}

TEST_CASE("Gamma-Poisson: constants match Richardson extrapolation in n") {
  const double ybar = 3.0, shape = 2.5, rate = 0.5;
  auto model = [&](double n) { return gamma_poisson_model(n, ybar * n, shape, rate); };
  const LaplaceModel m = model(100.0);
  const LaplaceResult r = run(m);
  const double c1_rich = 2.0 * first_residual(model(400.0)) - first_residual(model(200.0));
  CHECK(r.c1 == doctest::Approx(c1_rich).epsilon(0.01));
  const double c2_rich = 2.0 * second_residual(model(400.0), r.c1) - second_residual(model(200.0), r.c1);
  CHECK(r.c2 == doctest::Approx(c2_rich).epsilon(0.05));
}

TEST_CASE("t-test peri-null at (0, 1), kappa0 = 0.05: C1 near -199.83") {
  const LaplaceModel a = ttest_model(TTestPrior::Peri, 0.05, 1000, 0.0, 1.0, DerivativeSource::Analytic);
  CHECK(laplace_c1(coeffs_of(a)) == doctest::Approx(-199.8333).epsilon(0.5 / 199.8333));
  const LaplaceModel f = ttest_model(TTestPrior::Peri, 0.05, 1000, 0.0, 1.0, DerivativeSource::FiniteDifference);
  CHECK(laplace_c1(coeffs_of(f)) == doctest::Approx(-199.8333).epsilon(5.0 / 199.8333));
}

TEST_CASE("t-test models: C2 agrees with the quadrature-implied second-order residual") {
  struct Case {
    TTestPrior prior;
    double scale;
  };
  for (const Case& k : {Case{TTestPrior::Alt, 1.0}, Case{TTestPrior::Peri, 0.3}}) {
    auto model = [&](long n) { return ttest_model(k.prior, k.scale, n, 0.0, 1.0); };
    const LaplaceResult r = run(model(1000));
    const double rich = 2.0 * second_residual(model(4000), r.c1) - second_residual(model(2000), r.c1);
    CAPTURE(k.scale);
    CHECK(r.c1 == doctest::Approx(2.0 * first_residual(model(4000)) - first_residual(model(2000))).epsilon(0.01));
    CHECK(r.c2 == doctest::Approx(rich).epsilon(0.05));
  }
}

TEST_CASE("t-test peri-null marginal at n = 500 agrees with the Bayes factor engine") {
  // kappa0 = 0.05 needs n in the thousands before the expansion settles
  // (C2 ~ 6e4); kappa0 = 0.5 is well inside the asymptotic regime at n = 500.
  const LaplaceModel m = ttest_model(TTestPrior::Peri, 0.5, 500, 0.05, 1.02);
  const LaplaceResult r = run(m);
  REQUIRE(r.valid);
  CHECK(std::abs(r.with_c2 - m.exact_log_marginal) < 1e-3);
}

TEST_CASE("non-positive bracket is flagged, not clamped") {
  const LaplaceModel m = ttest_model(TTestPrior::Peri, 0.05, 100, 0.0, 1.0);
  const LaplaceResult r = run(m);
  CHECK_FALSE(r.valid);
  CHECK(r.bracket1 <= 0.0);
  CHECK(std::isnan(r.with_c1));
  CHECK(std::isfinite(r.leading));
  CHECK(std::isfinite(r.c1));
}

}
