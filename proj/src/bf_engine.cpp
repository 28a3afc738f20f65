#include "perinull/bf_engine.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "perinull/noncentral_t.hpp"

namespace perinull {

double cauchy_inside_mass(double kappa, double a) {
  return 2.0 / std::numbers::pi * std::atan(a / kappa);
}

double cauchy_outside_mass(double kappa, double a) {
  return 2.0 / std::numbers::pi * std::atan(kappa / a);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// P(X > x) for a Cauchy(0, kappa) variable, x >= 0, without cancellation.
double cauchy_upper_tail(double kappa, double x) {
  if (x <= 0.0) return 0.5 + std::atan(-x / kappa) / std::numbers::pi;
  return std::atan(kappa / x) / std::numbers::pi;
}

double normal_upper_tail(double kappa, double x) {
  return 0.5 * std::erfc(x / (kappa * std::numbers::sqrt2));
}

double cauchy_logpdf(double kappa, double d) {
  const double z = d / kappa;
  return -std::log(std::numbers::pi * kappa) - std::log1p(z * z);
}

double normal_logpdf(double kappa, double d) {
  const double z = d / kappa;
  return -0.5 * z * z - std::log(kappa) - 0.5 * std::log(2.0 * std::numbers::pi);
}

struct Segment {
  double lo;
  double hi;
};

// A prior restricted to a union of segments, together with the normalized
// prior mass lying beyond the outermost segment ends.
struct Integrand {
  std::function<double(double)> log_prior;
  std::vector<Segment> segments;
  double tail_mass_below = 0.0;
  double tail_mass_above = 0.0;
  double scale = 1.0;
};

class TLikelihood {
 public:
  explicit TLikelihood(const SummaryStats& s)
      : t_(s.t), nu_(s.nu), root_n_(std::sqrt(s.n_eff)) {}

  double operator()(double delta) const { return noncentral_t_logpdf(t_, nu_, root_n_ * delta); }

  // Rough location and spread of the likelihood in delta.
  double peak() const { return t_ / root_n_; }
  double width() const { return std::sqrt(1.0 + t_ * t_ / (2.0 * nu_)) / root_n_; }

 private:
  double t_;
  double nu_;
  double root_n_;
};

MarginalResult integrate_marginal(const TLikelihood& lik, const Integrand& in,
                                  const QuadratureConfig& cfg) {
  auto log_integrand = [&](double d) { return lik(d) + in.log_prior(d); };
  const double peak = lik.peak();
  const double w = lik.width();

  auto inside = [&](double d) {
    return std::any_of(in.segments.begin(), in.segments.end(),
                       [d](const Segment& s) { return d >= s.lo && d <= s.hi; });
  };

  std::vector<double> hints;
  for (double k : {0.25, 1.0, 3.0, 8.0}) {
    hints.push_back(-k * in.scale);
    hints.push_back(k * in.scale);
  }
  hints.push_back(0.0);
  for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) hints.push_back(peak + k * w);

  // The posterior mode sits between the prior mode and the likelihood peak.
  const double hull_lo = std::min(0.0, peak) - w;
  const double hull_hi = std::max(0.0, peak) + w;
  for (const Segment& s : in.segments) {
    const double a = std::max(s.lo, hull_lo);
    const double b = std::min(s.hi, hull_hi);
    if (a < b) {
      auto r = boost::math::tools::brent_find_minima(
          [&](double d) { return -log_integrand(d); }, a, b, 40);
      hints.push_back(r.first);
    }
  }

  double ref = kNegInf;
  for (double h : hints) {
    if (inside(h)) ref = std::max(ref, log_integrand(h));
  }
  for (const Segment& s : in.segments) {
    ref = std::max({ref, log_integrand(s.lo), log_integrand(s.hi)});
  }
  if (!std::isfinite(ref)) throw DegeneratePrior("integrand vanishes on the prior support");

  auto f = [&](double d) { return std::exp(log_integrand(d) - ref); };

  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  for (const Segment& s : in.segments) {
    std::vector<double> bp{s.lo, s.hi};
    for (double h : hints) {
      if (h > s.lo && h < s.hi) bp.push_back(h);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    const QuadratureResult q =
        integrate_adaptive(f, bp, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);
    value += q.value;
    error += q.error;
    converged = converged && q.converged;
  }

  // The likelihood is unimodal in delta with its mode inside the hull, so
  // beyond the outer ends it is bounded by its value there.
  double tail = 0.0;
  if (in.tail_mass_below > 0.0) {
    tail += in.tail_mass_below * std::exp(lik(in.segments.front().lo) - ref);
  }
  if (in.tail_mass_above > 0.0) {
    tail += in.tail_mass_above * std::exp(lik(in.segments.back().hi) - ref);
  }

  if (!(value > 0.0)) throw DegeneratePrior("marginal likelihood underflowed");
  MarginalResult out{ref + std::log(value), (error + tail) / value};
  if (!converged) {
    std::ostringstream os;
    os << "marginal likelihood quadrature did not converge within " << cfg.max_subdivisions
       << " subdivisions (log estimate " << out.log_value << ", bound " << out.error_bound << ")";
    throw ConvergenceError(os.str(), out.log_value, out.error_bound);
  }
  return out;
}

Integrand symmetric_integrand(const TLikelihood& lik, double scale, double halfwidth_sd,
                              std::function<double(double)> log_prior,
                              std::function<double(double)> upper_tail) {
  const double L = halfwidth_sd * scale;
  const double lo = std::min(-L, lik.peak() - 40.0 * lik.width());
  const double hi = std::max(L, lik.peak() + 40.0 * lik.width());
  Integrand in;
  in.log_prior = std::move(log_prior);
  in.segments = {{lo, hi}};
  in.tail_mass_below = upper_tail(-lo);
  in.tail_mass_above = upper_tail(hi);
  in.scale = scale;
  return in;
}

MarginalResult truncated_marginal(const TLikelihood& lik, const TruncatedCauchy& p,
                                  const QuadratureConfig& cfg) {
  const double k = p.kappa_e;
  if (!std::isfinite(p.a)) throw DegeneratePrior("interval half-width is infinite");
  const double mass = p.region == Region::Inside ? cauchy_inside_mass(k, p.a)
                                                 : cauchy_outside_mass(k, p.a);
  if (!(mass >= std::numeric_limits<double>::min())) {
    throw DegeneratePrior("truncated Cauchy slice carries no representable prior mass");
  }
  const double log_mass = std::log(mass);
  Integrand in;
  in.log_prior = [k, log_mass](double d) { return cauchy_logpdf(k, d) - log_mass; };
  in.scale = k;
  if (p.region == Region::Inside) {
    in.segments = {{-p.a, p.a}};
  } else {
    const double U = std::max(p.a + cfg.domain_halfwidth_sd * k,
                              std::abs(lik.peak()) + 40.0 * lik.width());
    in.segments = {{-U, -p.a}, {p.a, U}};
    in.tail_mass_below = cauchy_upper_tail(k, U) / mass;
    in.tail_mass_above = in.tail_mass_below;
  }
  return integrate_marginal(lik, in, cfg);
}

}  // namespace

MarginalResult marginal_loglik(const SummaryStats& stats, const PriorSpec& raw_prior,
                               const QuadratureConfig& cfg) {
  validate(stats);
  validate(raw_prior);
  validate(cfg);
  const PriorSpec prior = resolve(raw_prior, stats);
  const TLikelihood lik(stats);

  if (std::holds_alternative<PointAtZero>(prior)) {
    return {noncentral_t_logpdf(stats.t, stats.nu, 0.0), 0.0};
  }
  if (const auto* p = std::get_if<PeriNullNormal>(&prior)) {
    const double k = p->kappa0;
    return integrate_marginal(
        lik,
        symmetric_integrand(
            lik, k, cfg.domain_halfwidth_sd, [k](double d) { return normal_logpdf(k, d); },
            [k](double x) { return normal_upper_tail(k, x); }),
        cfg);
  }
  if (const auto* p = std::get_if<AltCauchy>(&prior)) {
    const double k = p->kappa1;
    return integrate_marginal(
        lik,
        symmetric_integrand(
            lik, k, cfg.domain_halfwidth_sd, [k](double d) { return cauchy_logpdf(k, d); },
            [k](double x) { return cauchy_upper_tail(k, x); }),
        cfg);
  }
  if (const auto* p = std::get_if<TruncatedCauchy>(&prior)) {
    return truncated_marginal(lik, *p, cfg);
  }
  if (const auto* p = std::get_if<PeriPointMixture>(&prior)) {
    const MarginalResult spike = marginal_loglik(stats, PointAtZero{}, cfg);
    const MarginalResult slab = marginal_loglik(stats, PeriNullNormal{p->kappa0}, cfg);
    const double a = std::log(p->xi) + spike.log_value;
    const double b = std::log1p(-p->xi) + slab.log_value;
    const double total = log_sum_exp(a, b);
    // Relative errors mix with the posterior weights of the two components.
    const double err = std::exp(a - total) * spike.error_bound + std::exp(b - total) * slab.error_bound;
    return {total, err};
  }
  throw InvalidInput("unsupported prior");  // ShrinkingPeriNull is resolved above
}

BFResult point_null_bf10(const SummaryStats& stats, double kappa1, const QuadratureConfig& cfg,
                         double prior_odds) {
  const MarginalResult alt = marginal_loglik(stats, AltCauchy{kappa1}, cfg);
  const MarginalResult null = marginal_loglik(stats, PointAtZero{}, cfg);
  return make_bf_result(alt.log_value - null.log_value, alt.error_bound + null.error_bound,
                        prior_odds);
}

BFResult peri_null_correction_bf(const SummaryStats& stats, double kappa0,
                                 const QuadratureConfig& cfg, double prior_odds) {
  const MarginalResult null = marginal_loglik(stats, PointAtZero{}, cfg);
  const MarginalResult peri = marginal_loglik(stats, PeriNullNormal{kappa0}, cfg);
  return make_bf_result(null.log_value - peri.log_value, null.error_bound + peri.error_bound,
                        prior_odds);
}

BFResult peri_null_bf(const SummaryStats& stats, double kappa0, double kappa1,
                      const QuadratureConfig& cfg, double prior_odds) {
  const MarginalResult alt = marginal_loglik(stats, AltCauchy{kappa1}, cfg);
  const MarginalResult peri = marginal_loglik(stats, PeriNullNormal{kappa0}, cfg);
  BFResult r = make_bf_result(alt.log_value - peri.log_value, alt.error_bound + peri.error_bound,
                              prior_odds);
  const MarginalResult point = marginal_loglik(stats, PointAtZero{}, cfg);
  r.point_null_log_bf = alt.log_value - point.log_value;
  r.correction_log_bf = point.log_value - peri.log_value;
  return r;
}

BFResult interval_null_bf(const SummaryStats& stats, double kappa_e, double a,
                          const QuadratureConfig& cfg, double prior_odds) {
  const MarginalResult out =
      marginal_loglik(stats, TruncatedCauchy{kappa_e, a, Region::Outside}, cfg);
  const MarginalResult in = marginal_loglik(stats, TruncatedCauchy{kappa_e, a, Region::Inside}, cfg);
  return make_bf_result(out.log_value - in.log_value, out.error_bound + in.error_bound, prior_odds);
}

BFResult peri_point_bf(const SummaryStats& stats, double xi, double kappa0, double kappa1,
                       const QuadratureConfig& cfg, double prior_odds) {
  if (!(xi > 0.0 && xi < 1.0)) throw InvalidInput("mixture weight xi must lie strictly inside (0, 1)");
  const MarginalResult alt = marginal_loglik(stats, AltCauchy{kappa1}, cfg);
  const MarginalResult mix = marginal_loglik(stats, PeriPointMixture{xi, kappa0}, cfg);
  const MarginalResult point = marginal_loglik(stats, PointAtZero{}, cfg);
  BFResult r =
      make_bf_result(alt.log_value - mix.log_value, alt.error_bound + mix.error_bound, prior_odds);
  r.point_null_log_bf = alt.log_value - point.log_value;
  r.correction_log_bf = point.log_value - mix.log_value;
  return r;
}

BFResult shrinking_peri_null_bf(const SummaryStats& stats, double c, double kappa1,
                                const QuadratureConfig& cfg, double prior_odds) {
  validate(PriorSpec{ShrinkingPeriNull{c}});
  validate(stats);
  return peri_null_bf(stats, c / std::sqrt(static_cast<double>(stats.n_total)), kappa1, cfg,
                      prior_odds);
}

}  // namespace perinull
