#pragma once

// Closed-form large-sample theory of the peri-null t-test Bayes factor
// log BF1~0, with a Cauchy(0, kappa1) alternative and a Normal(0, kappa0^2)
// peri-null on delta = mu / sigma, at the data-generating theta = (mu, sigma).
//
// Everything depends on theta only through delta. The Fisher information of
// the normal model in (mu, sigma) coordinates is diag(1/sigma^2, 2/sigma^2).

#include <Eigen/Dense>

#include "perinull/core.hpp"

namespace perinull {

// Limit in probability of log BF1~0: log pi(theta | H1) - log pi(theta | H0~).
double limit_log_bf(double mu, double sigma, double kappa0, double kappa1);

struct GradientHessian {
  Eigen::Vector2d grad;
  Eigen::Matrix2d hessian;
};

// Exact derivatives of limit_log_bf with respect to (mu, sigma).
GradientHessian limit_gradient_hessian(double mu, double sigma, double kappa0, double kappa1);

Eigen::Matrix2d fisher_information(double sigma);

// (mu^4 + 2 mu^2 sigma^2) (mu^2 + (kappa1^2 - 2 kappa0^2) sigma^2)^2
//   / (2 kappa0^4 sigma^4 (mu^2 + kappa1^2 sigma^2)^2 n)
double asymptotic_variance(double mu, double sigma, double kappa0, double kappa1, double n);

// grad' I^-1 grad / n; the same quantity through the delta method.
double sandwich_variance(double mu, double sigma, double kappa0, double kappa1, double n);

// Laplace correction constants of the two marginals (alternative and
// peri-null), in closed form.
struct CConstants {
  double c1_alt = 0.0;
  double c2_alt = 0.0;
  double c1_peri = 0.0;
  double c2_peri = 0.0;
};

CConstants c_constants(double mu, double sigma, double kappa0, double kappa1);

// Smallest n >= 1 such that 1 + c1/m + c2/m^2 > 0 for every m >= n.
long bracket_threshold(double c1, double c2);

enum class BracketFailure { None, Alternative, PeriNull, Both };

std::string to_string(BracketFailure f);

struct BiasTerm {
  bool valid = true;
  double value = 0.0;  // NaN when invalid
  BracketFailure failed = BracketFailure::None;
  double bracket_alt = 1.0;
  double bracket_peri = 1.0;
  long min_valid_n = 1;  // first n from which both brackets stay positive
};

// E(theta, n) = log[(1 + C1_alt/n + C2_alt/n^2) / (1 + C1_peri/n + C2_peri/n^2)].
// A nonpositive bracket is reported through the flag, not thrown.
BiasTerm bias_term(double mu, double sigma, double kappa0, double kappa1, double n);
BiasTerm bias_term(const CConstants& c, double n);

// Coefficient of Z^2 / n in log BF1~0 when mu = 0:
// (kappa1^2 - 2 kappa0^2) / (2 kappa0^2 kappa1^2).
double chi_square_coefficient(double kappa0, double kappa1);

enum class Regime { FirstOrderNormal, SecondOrderChiSquare };

std::string to_string(Regime r);

// Approximate sampling distribution of log BF1~0 at sample size n:
//   FirstOrderNormal:     Normal(v + E, asymptotic_variance)
//   SecondOrderChiSquare: v + E + coefficient * X / n,  X ~ chi2(1)
class SamplingDistribution {
 public:
  SamplingDistribution(Regime regime, double location, double spread, bool usable);

  Regime regime() const noexcept { return regime_; }
  bool usable() const noexcept { return usable_; }
  double location() const noexcept { return location_; }  // v + E
  // Standard deviation (normal) or the chi-square multiplier coefficient / n.
  double spread() const noexcept { return spread_; }

  // Throw InvalidInput when the descriptor is unusable or p is outside (0, 1).
  double mean() const;
  double sd() const;
  double quantile(double p) const;

 private:
  Regime regime_;
  double location_;
  double spread_;
  bool usable_;
};

Regime classify_regime(double mu, double sigma, double kappa0, double kappa1);

SamplingDistribution sampling_distribution(double mu, double sigma, double kappa0, double kappa1,
                                           double n);

struct AsymptoticSummary {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double n = 0.0;
  double limit_log_bf = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  double hessian_mu_mu = 0.0;
  double variance_over_n = 0.0;  // n * asymptotic_variance
  CConstants c;
  BiasTerm bias;
  Regime regime = Regime::FirstOrderNormal;
};

AsymptoticSummary summarize(double mu, double sigma, double kappa0, double kappa1, double n);

}  // namespace perinull
