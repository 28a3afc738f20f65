#pragma once

// Marginal likelihoods and Bayes factors for the t-test family.
//
// With the nuisance prior pi(sigma) ~ 1/sigma the data enter only through the
// t statistic, whose density given delta is noncentral t with
// ncp = sqrt(n_eff) * delta. Every marginal is therefore the one-dimensional
// integral  p(t | H) = Int nct(t; nu, sqrt(n_eff) delta) pi(delta | H) d delta,
// evaluated in log space.

#include "perinull/core.hpp"
#include "perinull/quadrature.hpp"

namespace perinull {

struct MarginalResult {
  double log_value = 0.0;
  double error_bound = 0.0;  // absolute bound on log_value
};

// Log prior predictive density of t under `prior`. Throws ConvergenceError
// when the quadrature does not meet tolerance within max_subdivisions, and
// DegeneratePrior when a truncated prior carries no representable mass.
MarginalResult marginal_loglik(const SummaryStats& stats, const PriorSpec& prior,
                               const QuadratureConfig& cfg = {});

// BF10: Cauchy(0, kappa1) alternative against the point null.
BFResult point_null_bf10(const SummaryStats& stats, double kappa1, const QuadratureConfig& cfg = {},
                         double prior_odds = 1.0);

// BF0~0: point null against the Normal(0, kappa0^2) peri-null.
BFResult peri_null_correction_bf(const SummaryStats& stats, double kappa0,
                                 const QuadratureConfig& cfg = {}, double prior_odds = 1.0);

// BF1~0 = BF10 * BF0~0. log_bf is the direct ratio of marginals; the two
// components are stored alongside.
BFResult peri_null_bf(const SummaryStats& stats, double kappa0, double kappa1,
                      const QuadratureConfig& cfg = {}, double prior_odds = 1.0);

// Outside-interval against inside-interval hypothesis, both slices of the
// encompassing Cauchy(0, kappa_e).
BFResult interval_null_bf(const SummaryStats& stats, double kappa_e, double a,
                          const QuadratureConfig& cfg = {}, double prior_odds = 1.0);

// Alternative against xi * point + (1 - xi) * peri-null.
BFResult peri_point_bf(const SummaryStats& stats, double xi, double kappa0, double kappa1,
                       const QuadratureConfig& cfg = {}, double prior_odds = 1.0);

// peri_null_bf with kappa0 = c / sqrt(n_total).
BFResult shrinking_peri_null_bf(const SummaryStats& stats, double c, double kappa1,
                                const QuadratureConfig& cfg = {}, double prior_odds = 1.0);

// Prior probability that a Cauchy(0, kappa) draw satisfies |delta| <= a.
double cauchy_inside_mass(double kappa, double a);
double cauchy_outside_mass(double kappa, double a);

}  // namespace perinull
