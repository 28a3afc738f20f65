#pragma once

// Domain types shared by the Bayes factor engine, the Laplace expansion, the
// asymptotic formulas and the simulation harness.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace perinull {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedOrder : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegeneratePrior : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// ---------------------------------------------------------------------------
// Data summaries
// ---------------------------------------------------------------------------

enum class Design { OneSample, TwoSample };

std::string to_string(Design d);

// Sufficient input for every t-test Bayes factor. t carries the sign of
// (mean1 - mean2) for two-sample designs; symmetric priors only see |t|.
struct SummaryStats {
  double t = 0.0;
  double nu = 1.0;     // degrees of freedom
  double n_eff = 2.0;  // multiplies delta in the noncentrality parameter
  Design design = Design::OneSample;
  long n_total = 2;
};

SummaryStats ingest_one_sample(double t, long n);

// Pooled-variance two-sample t statistic from group means, sds and sizes.
SummaryStats ingest_two_sample(double mean1, double sd1, long n1, double mean2, double sd2,
                               long n2);

// Two-sample design with an externally supplied t statistic.
SummaryStats two_sample_from_t(double t, long n1, long n2);

void validate(const SummaryStats& s);

// theta = (mu, sigma) together with the standardized effect size.
class ParamPoint {
 public:
  ParamPoint(double mu, double sigma);
  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }
  double delta() const noexcept { return delta_; }

 private:
  double mu_;
  double sigma_;
  double delta_;
};

// ---------------------------------------------------------------------------
// Priors on the standardized effect size delta
// ---------------------------------------------------------------------------

struct PointAtZero {};

struct PeriNullNormal {
  double kappa0;
};

struct AltCauchy {
  double kappa1;
};

enum class Region { Inside, Outside };

// Cauchy(0, kappa_e) restricted to |delta| <= a (Inside) or |delta| > a
// (Outside), renormalized.
struct TruncatedCauchy {
  double kappa_e;
  double a;
  Region region;
};

// xi * point mass at zero + (1 - xi) * Normal(0, kappa0^2).
struct PeriPointMixture {
  double xi;
  double kappa0;
};

// Normal(0, kappa0^2) with kappa0 = c / sqrt(n_total), resolved per data set.
struct ShrinkingPeriNull {
  double c;
};

using PriorSpec = std::variant<PointAtZero, PeriNullNormal, AltCauchy, TruncatedCauchy,
                               PeriPointMixture, ShrinkingPeriNull>;

void validate(const PriorSpec& prior);
std::string describe(const PriorSpec& prior);

// Replaces ShrinkingPeriNull with the equivalent PeriNullNormal for the data.
PriorSpec resolve(const PriorSpec& prior, const SummaryStats& stats);

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct BFResult {
  double log_bf = 0.0;
  double bf = 1.0;
  std::optional<double> point_null_log_bf;  // log BF10 component
  std::optional<double> correction_log_bf;  // log BF0~0 component
  double posterior_prob_numerator = 0.5;
  double prior_odds = 1.0;
  double quad_error_bound = 0.0;  // on log_bf
};

// Fills bf and the posterior probability from log_bf and prior_odds.
BFResult make_bf_result(double log_bf, double quad_error_bound, double prior_odds = 1.0);

// prior_odds * bf / (1 + prior_odds * bf), evaluated without overflow.
double posterior_probability(double log_bf, double prior_odds);

}  // namespace perinull
