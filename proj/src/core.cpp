#include "perinull/core.hpp"

#include <cmath>
#include <sstream>

namespace perinull {

std::string to_string(Design d) {
  return d == Design::OneSample ? "one-sample" : "two-sample";
}

void validate(const SummaryStats& s) {
  if (!std::isfinite(s.t)) throw InvalidInput("t statistic must be finite");
  if (!(s.nu > 0.0)) throw InvalidInput("degrees of freedom must be positive");
  if (!(s.n_eff > 0.0)) throw InvalidInput("effective sample size must be positive");
  if (s.n_total < 2) throw InvalidInput("total sample size must be at least 2");
}

SummaryStats ingest_one_sample(double t, long n) {
  if (n < 2) throw InvalidInput("one-sample design needs n >= 2");
  if (!std::isfinite(t)) throw InvalidInput("t statistic must be finite");
  return SummaryStats{t, static_cast<double>(n - 1), static_cast<double>(n), Design::OneSample,
                      n};
}

SummaryStats two_sample_from_t(double t, long n1, long n2) {
  if (n1 < 2 || n2 < 2) throw InvalidInput("two-sample design needs group sizes >= 2");
  if (!std::isfinite(t)) throw InvalidInput("t statistic must be finite");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return SummaryStats{t, a + b - 2.0, a * b / (a + b), Design::TwoSample, n1 + n2};
}

SummaryStats ingest_two_sample(double mean1, double sd1, long n1, double mean2, double sd2,
                               long n2) {
  if (!(sd1 > 0.0) || !(sd2 > 0.0)) throw InvalidInput("group standard deviations must be positive");
  if (n1 < 2 || n2 < 2) throw InvalidInput("two-sample design needs group sizes >= 2");
  if (!std::isfinite(mean1) || !std::isfinite(mean2)) throw InvalidInput("group means must be finite");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double nu = a + b - 2.0;
  const double pooled_var = ((a - 1.0) * sd1 * sd1 + (b - 1.0) * sd2 * sd2) / nu;
  const double se = std::sqrt(pooled_var * (1.0 / a + 1.0 / b));
  return two_sample_from_t((mean1 - mean2) / se, n1, n2);
}

ParamPoint::ParamPoint(double mu, double sigma) : mu_(mu), sigma_(sigma), delta_(0.0) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be positive");
  if (!std::isfinite(mu)) throw InvalidInput("mu must be finite");
  delta_ = mu / sigma;
}

namespace {

void require_scale(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(name) + " must be a positive finite scale");
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void validate(const PriorSpec& prior) {
  std::visit(overloaded{
                 [](const PointAtZero&) {},
                 [](const PeriNullNormal& p) { require_scale(p.kappa0, "kappa0"); },
                 [](const AltCauchy& p) { require_scale(p.kappa1, "kappa1"); },
                 [](const TruncatedCauchy& p) {
                   require_scale(p.kappa_e, "kappa_e");
                   if (!(p.a > 0.0) || std::isnan(p.a)) throw InvalidInput("interval half-width a must be positive");
                 },
                 [](const PeriPointMixture& p) {
                   if (!(p.xi > 0.0 && p.xi < 1.0)) throw InvalidInput("mixture weight xi must lie strictly inside (0, 1)");
                   require_scale(p.kappa0, "kappa0");
                 },
                 [](const ShrinkingPeriNull& p) { require_scale(p.c, "c"); },
             },
             prior);
}

std::string describe(const PriorSpec& prior) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const PointAtZero&) { os << "point(0)"; },
                 [&](const PeriNullNormal& p) { os << "normal(0, " << p.kappa0 << ")"; },
                 [&](const AltCauchy& p) { os << "cauchy(0, " << p.kappa1 << ")"; },
                 [&](const TruncatedCauchy& p) {
                   os << "cauchy(0, " << p.kappa_e << ") on "
                      << (p.region == Region::Inside ? "|delta| <= " : "|delta| > ") << p.a;
                 },
                 [&](const PeriPointMixture& p) {
                   os << p.xi << " * point(0) + " << 1.0 - p.xi << " * normal(0, " << p.kappa0 << ")";
                 },
                 [&](const ShrinkingPeriNull& p) { os << "normal(0, " << p.c << " / sqrt(n))"; },
             },
             prior);
  return os.str();
}

PriorSpec resolve(const PriorSpec& prior, const SummaryStats& stats) {
  if (const auto* s = std::get_if<ShrinkingPeriNull>(&prior)) {
    return PeriNullNormal{s->c / std::sqrt(static_cast<double>(stats.n_total))};
  }
  return prior;
}

double posterior_probability(double log_bf, double prior_odds) {
  // logistic(log_bf + log prior_odds)
  const double z = log_bf + std::log(prior_odds);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

BFResult make_bf_result(double log_bf, double quad_error_bound, double prior_odds) {
  if (!(prior_odds > 0.0) || !std::isfinite(prior_odds)) throw InvalidInput("prior odds must be positive");
  BFResult r;
  r.log_bf = log_bf;
  r.bf = std::exp(log_bf);
  r.prior_odds = prior_odds;
  r.posterior_prob_numerator = posterior_probability(log_bf, prior_odds);
  r.quad_error_bound = quad_error_bound;
  return r;
}

}  // namespace perinull
