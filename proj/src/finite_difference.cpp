#include "perinull/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>

#include "perinull/core.hpp"

namespace perinull {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kTableau = 10;
constexpr double kShrink = 2.0;
constexpr double kSafe = 2.0;

struct StencilValue {
  double value;
  double roundoff;
};

// Tensor-product centered difference at scale t. Offsets for order m are
// (m/2 - k) h, k = 0..m, with weights (-1)^k binom(m, k).
StencilValue stencil(const ScalarFunction& f, std::span<const double> x, const IndexCounts& c,
                     double t) {
  const int dim = static_cast<int>(x.size());
  std::array<double, 2> h{};
  double denom = 1.0;
  for (int i = 0; i < dim; ++i) {
    h[i] = t * std::max(1.0, std::abs(x[i]));
    denom *= std::pow(h[i], c[i]);
  }
  const int m0 = c[0];
  const int m1 = dim > 1 ? c[1] : 0;
  std::vector<double> pt(x.begin(), x.end());
  double sum = 0.0;
  double abs_sum = 0.0;
  for (int k0 = 0; k0 <= m0; ++k0) {
    const double w0 = ((k0 % 2) ? -1.0 : 1.0) * boost::math::binomial_coefficient<double>(m0, k0);
    pt[0] = x[0] + (0.5 * m0 - k0) * h[0];
    for (int k1 = 0; k1 <= m1; ++k1) {
      const double w1 = ((k1 % 2) ? -1.0 : 1.0) * boost::math::binomial_coefficient<double>(m1, k1);
      if (dim > 1) pt[1] = x[1] + (0.5 * m1 - k1) * h[1];
      const double fv = f(pt);
      if (!std::isfinite(fv)) throw InvalidInput("function is not finite inside the difference stencil");
      sum += w0 * w1 * fv;
      abs_sum += std::abs(w0 * w1 * fv);
    }
  }
  return {sum / denom, kEps * abs_sum / denom};
}

void check_dims(std::span<const double> point) {
  if (point.empty()) throw InvalidInput("point must have at least one coordinate");
  if (point.size() > 2) throw UnsupportedOrder("numerical differentiation is limited to two dimensions");
  for (double v : point)
    if (!std::isfinite(v)) throw InvalidInput("point must be finite");
}

}  // namespace

PartialEstimate finite_difference_partial(const ScalarFunction& f, std::span<const double> point,
                                          const IndexCounts& counts) {
  check_dims(point);
  int order = 0;
  for (int i = 0; i < kMaxDim; ++i) {
    if (i >= static_cast<int>(point.size()) && counts[i] != 0) throw InvalidInput("index beyond the point's dimension");
    order += counts[i];
  }
  if (order > 6) throw UnsupportedOrder("numerical derivatives are limited to order 6");
  if (order == 0) return {f(point), 0.0};

  double t = 8.0 * std::pow(kEps, 1.0 / (order + 2));
  std::array<std::array<double, kTableau>, kTableau> a{};
  StencilValue s = stencil(f, point, counts, t);
  a[0][0] = s.value;
  PartialEstimate best{s.value, std::numeric_limits<double>::infinity()};
  double best_roundoff = s.roundoff;
  for (int i = 1; i < kTableau; ++i) {
    t /= kShrink;
    s = stencil(f, point, counts, t);
    a[0][i] = s.value;
    double fac = kShrink * kShrink;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= kShrink * kShrink;
      const double err =
          std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (err <= best.error) {
        best = {a[j][i], err};
        best_roundoff = s.roundoff;
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= kSafe * best.error) break;
  }
  // Extrapolation amplifies stencil rounding by a small constant factor.
  best.error = std::max(best.error, 4.0 * best_roundoff);
  return best;
}

DerivativeSet finite_difference_derivatives(const ScalarFunction& f, std::span<const double> point,
                                            int max_order) {
  check_dims(point);
  if (max_order < 1) throw InvalidInput("max_order must be at least 1");
  if (max_order > 6) throw UnsupportedOrder("numerical derivatives are limited to order 6");
  const int dim = static_cast<int>(point.size());

  DerivativeSet out;
  out.value = f(point);
  if (!std::isfinite(out.value)) throw InvalidInput("function is not finite at the point");
  for (int k = 1; k <= max_order; ++k) {
    SymmetricTensor val(dim, k);
    SymmetricTensor err(dim, k);
    for (const IndexCounts& c : all_counts(dim, k)) {
      const PartialEstimate e = finite_difference_partial(f, point, c);
      val.set(c, e.value);
      err.set(c, e.error);
    }
    out.values[k] = std::move(val);
    out.errors[k] = std::move(err);
  }
  return out;
}

LikelihoodOracle fd_likelihood_oracle(ScalarFunction h, double n) {
  return [h = std::move(h), n](std::span<const double> theta) {
    const DerivativeSet d = finite_difference_derivatives(h, theta, 6);
    LikelihoodExpansion e;
    e.log_likelihood = -n * d.value;
    for (int k = 2; k <= 6; ++k) e.h_derivs[k] = d.values[k];
    return e;
  };
}

PriorOracle fd_prior_oracle(ScalarFunction density) {
  return [density = std::move(density)](std::span<const double> theta) {
    const DerivativeSet d = finite_difference_derivatives(density, theta, 4);
    PriorExpansion e;
    e.value = d.value;
    for (int k = 1; k <= 4; ++k) e.derivs[k] = d.values[k];
    return e;
  };
}

}  // namespace perinull
