#include "perinull/noncentral_t.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "perinull/core.hpp"

namespace perinull {

double student_t_logpdf(double x, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("degrees of freedom must be positive");
  if (!std::isfinite(x)) throw InvalidInput("t density argument must be finite");
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * std::numbers::pi) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double noncentral_t_logpdf(double x, double nu, double ncp) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("degrees of freedom must be positive");
  if (!std::isfinite(x) || !std::isfinite(ncp)) throw InvalidInput("noncentral t arguments must be finite");
  if (ncp == 0.0) return student_t_logpdf(x, nu);

  const double A = nu + x * x;
  const double rootA = std::sqrt(A);
  const double b = ncp * (x / rootA);
  const double m = nu + 1.0;

  // Mode of H(u) = m u - (rootA e^u - b)^2 / 2: positive root y* of
  // A y^2 - rootA b y - m = 0 with y = e^u. y* is close to 1 for large nu, so
  // y* - 1 is formed directly (m - A = 1 - x^2) to keep m log y* accurate.
  const double disc = std::sqrt(b * b + 4.0 * m);
  const double one_minus_x2 = 1.0 - x * x;
  double ym1;
  if (b >= 0.0) {
    ym1 = (b + (b * b + 4.0 * one_minus_x2) / (disc + 2.0 * rootA)) / (2.0 * rootA);
  } else {
    const double num = (4.0 * m * one_minus_x2 - A * b * b) / (2.0 * m + rootA * disc) + rootA * b;
    ym1 = num / (rootA * (disc - b));
  }
  const double u_star = std::log1p(ym1);
  const double q = rootA * (1.0 + ym1);

  // With q (q - b) = m, H(u*) = m u* - m/2 + b q / 2 - b^2 / 2, and in the
  // offset s = u - u*:  H - H(u*) = m (s - expm1 s) - q^2 expm1(s)^2 / 2.
  // The -m/2 goes into the constant, which does not depend on ncp.
  const double h_star = m * u_star + 0.5 * b * (q - b);
  auto G = [&](double s) {
    const double e = std::expm1(s);
    return m * (s - e) - 0.5 * q * q * e * e;
  };
  // -G''(0) = q^2 + m
  const double width = 1.0 / std::sqrt(q * q + m);

  constexpr double kCut = 80.0;
  auto edge = [&](double direction) {
    double step = 4.0 * width;
    while (G(direction * step) > -kCut) step *= 2.0;
    return direction * step;
  };
  const double lo = edge(-1.0);
  const double hi = edge(+1.0);

  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0;
  const double integral =
      Rule::integrate([&](double s) { return std::exp(G(s)); }, lo, hi, 4, 1e-13, &err);

  const double half_nu = 0.5 * nu;
  const double log_c = std::log(2.0) + half_nu * std::log(half_nu) - std::lgamma(half_nu) -
                       0.5 * m - 0.5 * std::log(2.0 * std::numbers::pi);
  return log_c - 0.5 * ncp * ncp * (nu / A) + h_star + std::log(integral);
}

}  // namespace perinull
