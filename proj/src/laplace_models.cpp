#include "perinull/laplace_models.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/differentiation/autodiff.hpp>

#include "perinull/bf_engine.hpp"
#include "perinull/core.hpp"
#include "perinull/finite_difference.hpp"

namespace perinull {

namespace ad = boost::math::differentiation;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Taylor tensors of a 1-D function from an autodiff variable of order >= hi.
template <class F>
void fill_1d(const F& v, int lo, int hi, std::optional<SymmetricTensor>* out) {
  for (int k = lo; k <= hi; ++k) {
    SymmetricTensor t(1, k);
    t.set(IndexCounts{k, 0, 0}, v.derivative(k));
    out[k] = std::move(t);
  }
}

template <class F>
void fill_2d(const F& v, int lo, int hi, std::optional<SymmetricTensor>* out) {
  for (int k = lo; k <= hi; ++k) {
    out[k] = SymmetricTensor::from_counts(2, k, [&](const IndexCounts& c) {
      return static_cast<double>(v.derivative(c[0], c[1]));
    });
  }
}

// Builds 1-D oracles from templates h(x) and density(x), evaluated on
// autodiff variables.
template <class H, class P>
void one_dim_oracles(LaplaceModel& m, H h, P density) {
  const double n = m.n;
  m.likelihood = [h, n](std::span<const double> theta) {
    const auto x = ad::make_fvar<double, 6>(theta[0]);
    const auto v = h(x);
    LikelihoodExpansion e;
    e.log_likelihood = -n * static_cast<double>(v);
    fill_1d(v, 2, 6, e.h_derivs.data());
    return e;
  };
  m.prior = [density](std::span<const double> theta) {
    const auto x = ad::make_fvar<double, 4>(theta[0]);
    const auto v = density(x);
    PriorExpansion e;
    e.value = static_cast<double>(v);
    fill_1d(v, 1, 4, e.derivs.data());
    return e;
  };
}

}  // namespace

LaplaceModel conjugate_gaussian_model(double n, double ybar, double sigma, double m0, double tau,
                                      double mean_sq_dev) {
  if (!(n > 0.0) || !(sigma > 0.0) || !(tau > 0.0) || mean_sq_dev < 0.0) {
    throw InvalidInput("conjugate Gaussian model needs n, sigma, tau > 0");
  }
  LaplaceModel m;
  m.name = "conjugate-gaussian";
  m.mle = {ybar};
  m.n = n;
  const double s2 = sigma * sigma;
  one_dim_oracles(
      m,
      [=](const auto& x) {
        return 0.5 * std::log(2.0 * std::numbers::pi * s2) + (mean_sq_dev + (ybar - x) * (ybar - x)) / (2.0 * s2);
      },
      [=](const auto& x) {
        using std::exp;
        return exp(-(x - m0) * (x - m0) / (2.0 * tau * tau)) / (tau * std::sqrt(2.0 * std::numbers::pi));
      });
  const double loglik = -0.5 * n * std::log(2.0 * std::numbers::pi * s2) - n * mean_sq_dev / (2.0 * s2);
  const double pred_var = tau * tau + s2 / n;
  m.exact_log_marginal = loglik + 0.5 * std::log(2.0 * std::numbers::pi * s2 / n) - 0.5 * kLog2Pi -
                         0.5 * std::log(pred_var) - (ybar - m0) * (ybar - m0) / (2.0 * pred_var);
  m.exact_source = "closed form";
  return m;
}

LaplaceModel beta_bernoulli_model(double n, double k, double alpha, double beta) {
  if (!(k > 0.0 && k < n)) throw InvalidInput("beta-Bernoulli model needs 0 < k < n");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("beta prior parameters must be positive");
  LaplaceModel m;
  m.name = "beta-bernoulli";
  const double p = k / n;
  m.mle = {p};
  m.n = n;
  const double log_beta_prior = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  one_dim_oracles(
      m,
      [=](const auto& x) {
        using std::log;
        return -p * log(x) - (1.0 - p) * log(1.0 - x);
      },
      [=](const auto& x) {
        using std::exp;
        using std::log;
        return exp((alpha - 1.0) * log(x) + (beta - 1.0) * log(1.0 - x) - log_beta_prior);
      });
  m.exact_log_marginal = std::lgamma(k + alpha) + std::lgamma(n - k + beta) -
                         std::lgamma(n + alpha + beta) - log_beta_prior;
  m.exact_source = "closed form";
  return m;
}

LaplaceModel gamma_poisson_model(double n, double total, double shape, double rate) {
  if (!(n > 0.0) || !(total > 0.0)) throw InvalidInput("gamma-Poisson model needs n > 0 and a positive count total");
  if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidInput("gamma prior parameters must be positive");
  LaplaceModel m;
  m.name = "gamma-poisson";
  const double ybar = total / n;
  m.mle = {ybar};
  m.n = n;
  const double log_norm = shape * std::log(rate) - std::lgamma(shape);
  one_dim_oracles(
      m, [=](const auto& x) {
        using std::log;
        return x - ybar * log(x);
      },
      [=](const auto& x) {
        using std::exp;
        using std::log;
        return exp(log_norm + (shape - 1.0) * log(x) - rate * x);
      });
  m.exact_log_marginal =
      log_norm + std::lgamma(total + shape) - (total + shape) * std::log(n + rate);
  m.exact_source = "closed form";
  return m;
}

double ttest_point_null_log_marginal(long n, double mu_hat, double sigma_hat) {
  const double nn = static_cast<double>(n);
  const double r = 0.5 * nn * (sigma_hat * sigma_hat + mu_hat * mu_hat);
  return -0.5 * nn * kLog2Pi + std::log(0.5) + std::lgamma(0.5 * nn) - 0.5 * nn * std::log(r);
}

LaplaceModel ttest_model(TTestPrior prior, double scale, long n, double mu_hat, double sigma_hat,
                         DerivativeSource source) {
  if (n < 3) throw InvalidInput("t-test model needs n >= 3");
  if (!(sigma_hat > 0.0) || !std::isfinite(mu_hat)) throw InvalidInput("t-test model needs sigma_hat > 0");
  if (!(scale > 0.0)) throw InvalidInput("prior scale must be positive");
  LaplaceModel m;
  m.name = prior == TTestPrior::Peri ? "ttest-peri" : "ttest-alt";
  m.mle = {mu_hat, sigma_hat};
  m.n = static_cast<double>(n);
  const double s2 = sigma_hat * sigma_hat;
  const double nn = m.n;

  auto h = [=](const auto& mu, const auto& sigma) {
    using std::log;
    return log(sigma) + (s2 + (mu_hat - mu) * (mu_hat - mu)) / (2.0 * sigma * sigma) + 0.5 * kLog2Pi;
  };
  auto density = [=](const auto& mu, const auto& sigma) {
    using std::exp;
    const auto d = mu / sigma;
    if (prior == TTestPrior::Peri) {
      return exp(-d * d / (2.0 * scale * scale)) / (scale * std::sqrt(2.0 * std::numbers::pi) * sigma * sigma);
    }
    return 1.0 / (std::numbers::pi * scale * (1.0 + d * d / (scale * scale)) * sigma * sigma);
  };

  if (source == DerivativeSource::Analytic) {
    m.likelihood = [h, nn](std::span<const double> theta) {
      const auto vars = ad::make_ftuple<double, 6, 6>(theta[0], theta[1]);
      const auto v = h(std::get<0>(vars), std::get<1>(vars));
      LikelihoodExpansion e;
      e.log_likelihood = -nn * static_cast<double>(v.derivative(0, 0));
      fill_2d(v, 2, 6, e.h_derivs.data());
      return e;
    };
    m.prior = [density](std::span<const double> theta) {
      const auto vars = ad::make_ftuple<double, 4, 4>(theta[0], theta[1]);
      const auto v = density(std::get<0>(vars), std::get<1>(vars));
      PriorExpansion e;
      e.value = static_cast<double>(v.derivative(0, 0));
      fill_2d(v, 1, 4, e.derivs.data());
      return e;
    };
  } else {
    m.likelihood = fd_likelihood_oracle([h](std::span<const double> x) { return h(x[0], x[1]); }, nn);
    m.prior = fd_prior_oracle([density](std::span<const double> x) { return density(x[0], x[1]); });
  }

  // t = sqrt(n) ybar / s with s^2 = n sigma_hat^2 / (n - 1).
  const SummaryStats stats = ingest_one_sample(std::sqrt(nn - 1.0) * mu_hat / sigma_hat, n);
  const PriorSpec spec = prior == TTestPrior::Peri ? PriorSpec{PeriNullNormal{scale}} : PriorSpec{AltCauchy{scale}};
  const MarginalResult num = marginal_loglik(stats, spec);
  const MarginalResult den = marginal_loglik(stats, PointAtZero{});
  m.exact_log_marginal = ttest_point_null_log_marginal(n, mu_hat, sigma_hat) + num.log_value - den.log_value;
  m.exact_source = "quadrature";
  return m;
}

}  // namespace perinull
