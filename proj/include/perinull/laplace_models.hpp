#pragma once

// Test models for the Laplace expansion, each paired with an independent
// value of its log marginal likelihood (closed form, or quadrature for the
// t-test models).

#include <string>
#include <vector>

#include "perinull/laplace.hpp"

namespace perinull {

enum class DerivativeSource { Analytic, FiniteDifference };

struct LaplaceModel {
  std::string name;
  std::vector<double> mle;
  double n = 1.0;
  LikelihoodOracle likelihood;
  PriorOracle prior;
  double exact_log_marginal = 0.0;
  std::string exact_source;
};

// y_i ~ N(theta, sigma^2), sigma known; theta ~ N(m0, tau^2). The data enter
// through ybar and the mean squared deviation about ybar.
LaplaceModel conjugate_gaussian_model(double n, double ybar, double sigma, double m0, double tau,
                                      double mean_sq_dev = 1.0);

// k successes in n Bernoulli trials, theta ~ Beta(alpha, beta). Needs 0 < k < n.
LaplaceModel beta_bernoulli_model(double n, double k, double alpha, double beta);

// Poisson counts with sum `total` over n observations, rate ~ Gamma(shape,
// rate). The count factorials are dropped from both sides.
LaplaceModel gamma_poisson_model(double n, double total, double shape, double rate);

enum class TTestPrior { Peri, Alt };

// Normal data with unknown (mu, sigma), summarized by the MLEs mu_hat and
// sigma_hat (divisor n). Prior: g(mu / sigma) / sigma^2 with g the
// Normal(0, scale^2) peri-null or the Cauchy(0, scale) alternative, i.e. the
// effect-size prior combined with the 1/sigma nuisance prior. The exact
// value uses the closed-form point-null marginal and the t-statistic
// marginals from the Bayes factor engine.
LaplaceModel ttest_model(TTestPrior prior, double scale, long n, double mu_hat, double sigma_hat,
                         DerivativeSource source = DerivativeSource::Analytic);

// Log marginal of the full data under the point null with prior 1/sigma.
double ttest_point_null_log_marginal(long n, double mu_hat, double sigma_hat);

}  // namespace perinull
