#include "perinull/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace perinull {

namespace {

void require(double sigma, double kappa0, double kappa1) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be positive");
  if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) throw InvalidInput("kappa0 must be positive");
  if (!(kappa1 > 0.0) || !std::isfinite(kappa1)) throw InvalidInput("kappa1 must be positive");
}

void require_n(double n) {
  if (!(n >= 1.0) || !std::isfinite(n)) throw InvalidInput("n must be at least 1");
}

// v as a function of delta: w(delta) = const + delta^2/(2 k0^2) - log(1 + delta^2/k1^2).
double w1(double d, double k0, double k1) { return d / (k0 * k0) - 2.0 * d / (k1 * k1 + d * d); }

double w2(double d, double k0, double k1) {
  const double s = k1 * k1 + d * d;
  return 1.0 / (k0 * k0) - 2.0 * (k1 * k1 - d * d) / (s * s);
}

}  // namespace

double limit_log_bf(double mu, double sigma, double kappa0, double kappa1) {
  require(sigma, kappa0, kappa1);
  const double d = mu / sigma;
  return 0.5 * std::log(2.0 / std::numbers::pi) + std::log(kappa0 / kappa1) +
         d * d / (2.0 * kappa0 * kappa0) - std::log1p(d * d / (kappa1 * kappa1));
}

GradientHessian limit_gradient_hessian(double mu, double sigma, double kappa0, double kappa1) {
  require(sigma, kappa0, kappa1);
  const double d = mu / sigma;
  const double a = w1(d, kappa0, kappa1);
  const double b = w2(d, kappa0, kappa1);
  const double s2 = sigma * sigma;
  GradientHessian gh;
  // delta_mu = 1/sigma, delta_sigma = -delta/sigma.
  gh.grad << a / sigma, -a * d / sigma;
  const double mm = b / s2;
  const double ms = -(b * d + a) / s2;
  const double ss = (d * d * b + 2.0 * d * a) / s2;
  gh.hessian << mm, ms, ms, ss;
  return gh;
}

Eigen::Matrix2d fisher_information(double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  Eigen::Matrix2d m;
  m << 1.0 / (sigma * sigma), 0.0, 0.0, 2.0 / (sigma * sigma);
  return m;
}

double asymptotic_variance(double mu, double sigma, double kappa0, double kappa1, double n) {
  require(sigma, kappa0, kappa1);
  require_n(n);
  const double m2 = mu * mu;
  const double s2 = sigma * sigma;
  const double k02 = kappa0 * kappa0;
  const double k12 = kappa1 * kappa1;
  const double a = m2 + (k12 - 2.0 * k02) * s2;
  const double b = m2 + k12 * s2;
  return (m2 * m2 + 2.0 * m2 * s2) * a * a / (2.0 * k02 * k02 * s2 * s2 * b * b * n);
}

double sandwich_variance(double mu, double sigma, double kappa0, double kappa1, double n) {
  require_n(n);
  const Eigen::Vector2d g = limit_gradient_hessian(mu, sigma, kappa0, kappa1).grad;
  return g.dot(fisher_information(sigma).inverse() * g) / n;
}

CConstants c_constants(double mu, double sigma, double kappa0, double kappa1) {
  require(sigma, kappa0, kappa1);
  const double m2 = mu * mu, m4 = m2 * m2, m6 = m4 * m2;
  const double s2 = sigma * sigma, s4 = s2 * s2, s6 = s4 * s2;
  const double k02 = kappa0 * kappa0, k04 = k02 * k02, k06 = k04 * k02;
  const double k12 = kappa1 * kappa1, k14 = k12 * k12;
  const double q = m2 + k12 * s2;

  CConstants c;
  c.c1_alt = (13.0 * m4 + (18.0 + 2.0 * k12) * s2 * m2 + (k12 - 6.0) * k12 * s4) / (6.0 * q * q);
  c.c2_alt = (780.0 * m6 + (1110.0 + 3127.0 * k12) * s2 * m4 + (6020.0 + 4462.0 * k12) * k12 * s4 * m2 +
              (5091.0 * k12 - 1426.0) * k14 * s6) /
             (-96.0 * q * q * q);
  c.c1_peri = (3.0 * m4 + 6.0 * s2 * m2 + k02 * s4 * (2.0 * k02 - 6.0)) / (12.0 * k04 * s4);
  c.c2_peri = (124.0 * m6 + (264.0 - 2369.0 * k02) * s2 * m4 + (10811.0 * k02 - 2218.0) * k02 * s4 * m2 +
               2.0 * (713.0 - 5091.0 * k02) * k04 * s6) /
              (192.0 * k06 * s6);
  return c;
}

long bracket_threshold(double c1, double c2) {
  // 1 + c1/m + c2/m^2 > 0  <=>  m^2 + c1 m + c2 > 0 for m > 0.
  auto positive = [&](double m) { return m * m + c1 * m + c2 > 0.0; };
  const double disc = c1 * c1 - 4.0 * c2;
  long n = 1;
  if (disc >= 0.0) {
    const double root = 0.5 * (-c1 + std::sqrt(disc));
    if (root >= 1.0) n = static_cast<long>(std::floor(root)) + 1;
  }
  while (!positive(static_cast<double>(n))) ++n;
  return n;
}

std::string to_string(BracketFailure f) {
  switch (f) {
    case BracketFailure::None: return "none";
    case BracketFailure::Alternative: return "alternative";
    case BracketFailure::PeriNull: return "peri-null";
    case BracketFailure::Both: return "both";
  }
  return "unknown";
}

BiasTerm bias_term(const CConstants& c, double n) {
  require_n(n);
  BiasTerm b;
  b.bracket_alt = 1.0 + c.c1_alt / n + c.c2_alt / (n * n);
  b.bracket_peri = 1.0 + c.c1_peri / n + c.c2_peri / (n * n);
  b.min_valid_n = std::max(bracket_threshold(c.c1_alt, c.c2_alt), bracket_threshold(c.c1_peri, c.c2_peri));
  const bool alt_ok = b.bracket_alt > 0.0;
  const bool peri_ok = b.bracket_peri > 0.0;
  if (alt_ok && peri_ok) {
    b.value = std::log(b.bracket_alt) - std::log(b.bracket_peri);
    return b;
  }
  b.valid = false;
  b.value = std::numeric_limits<double>::quiet_NaN();
  b.failed = !alt_ok && !peri_ok ? BracketFailure::Both
             : !alt_ok           ? BracketFailure::Alternative
                                 : BracketFailure::PeriNull;
  return b;
}

BiasTerm bias_term(double mu, double sigma, double kappa0, double kappa1, double n) {
  return bias_term(c_constants(mu, sigma, kappa0, kappa1), n);
}

double chi_square_coefficient(double kappa0, double kappa1) {
  require(1.0, kappa0, kappa1);
  const double k02 = kappa0 * kappa0;
  const double k12 = kappa1 * kappa1;
  return (k12 - 2.0 * k02) / (2.0 * k02 * k12);
}

std::string to_string(Regime r) {
  return r == Regime::FirstOrderNormal ? "first-order-normal" : "second-order-chi-square";
}

SamplingDistribution::SamplingDistribution(Regime regime, double location, double spread, bool usable)
    : regime_(regime), location_(location), spread_(spread), usable_(usable) {}

double SamplingDistribution::mean() const {
  if (!usable_) throw InvalidInput("sampling distribution is not available below the bracket threshold");
  return regime_ == Regime::FirstOrderNormal ? location_ : location_ + spread_;
}

double SamplingDistribution::sd() const {
  if (!usable_) throw InvalidInput("sampling distribution is not available below the bracket threshold");
  // Var(c X) = 2 c^2 for X ~ chi2(1).
  return regime_ == Regime::FirstOrderNormal ? spread_ : std::sqrt(2.0) * std::abs(spread_);
}

double SamplingDistribution::quantile(double p) const {
  if (!usable_) throw InvalidInput("sampling distribution is not available below the bracket threshold");
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("quantile level must lie in (0, 1)");
  if (regime_ == Regime::FirstOrderNormal) {
    if (spread_ == 0.0) return location_;
    return boost::math::quantile(boost::math::normal(location_, spread_), p);
  }
  const boost::math::chi_squared chi(1.0);
  // A negative multiplier reverses the order of the quantiles.
  const double x = spread_ >= 0.0 ? boost::math::quantile(chi, p) : boost::math::quantile(chi, 1.0 - p);
  return location_ + spread_ * x;
}

Regime classify_regime(double mu, double sigma, double kappa0, double kappa1) {
  const Eigen::Vector2d g = limit_gradient_hessian(mu, sigma, kappa0, kappa1).grad;
  return g.norm() < 1e-12 ? Regime::SecondOrderChiSquare : Regime::FirstOrderNormal;
}

SamplingDistribution sampling_distribution(double mu, double sigma, double kappa0, double kappa1,
                                           double n) {
  require_n(n);
  const double v = limit_log_bf(mu, sigma, kappa0, kappa1);
  const BiasTerm e = bias_term(mu, sigma, kappa0, kappa1, n);
  const Regime regime = classify_regime(mu, sigma, kappa0, kappa1);
  const double location = e.valid ? v + e.value : std::numeric_limits<double>::quiet_NaN();
  const double spread = regime == Regime::FirstOrderNormal
                            ? std::sqrt(asymptotic_variance(mu, sigma, kappa0, kappa1, n))
                            : chi_square_coefficient(kappa0, kappa1) / n;
  return SamplingDistribution(regime, location, spread, e.valid);
}

AsymptoticSummary summarize(double mu, double sigma, double kappa0, double kappa1, double n) {
  AsymptoticSummary s;
  s.mu = mu;
  s.sigma = sigma;
  s.kappa0 = kappa0;
  s.kappa1 = kappa1;
  s.n = n;
  s.limit_log_bf = limit_log_bf(mu, sigma, kappa0, kappa1);
  const GradientHessian gh = limit_gradient_hessian(mu, sigma, kappa0, kappa1);
  s.grad = gh.grad;
  s.hessian_mu_mu = gh.hessian(0, 0);
  s.variance_over_n = asymptotic_variance(mu, sigma, kappa0, kappa1, n) * n;
  s.c = c_constants(mu, sigma, kappa0, kappa1);
  s.bias = bias_term(s.c, n);
  s.regime = classify_regime(mu, sigma, kappa0, kappa1);
  return s;
}

}  // namespace perinull
