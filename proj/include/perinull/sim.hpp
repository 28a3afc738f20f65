#pragma once

// Seeded Monte Carlo over a sample-size grid: draw normal data, compute log
// Bayes factors per variant, and summarize their sampling distributions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perinull/core.hpp"
#include "perinull/quadrature.hpp"

namespace perinull {

enum class Variant { PointNull, PeriNull, IntervalNull, PeriPoint, Shrinking };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);  // throws InvalidInput

struct SimConfig {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa0 = 0.05;
  double kappa1 = 1.0;
  std::vector<long> n_grid;
  int replications = 100;
  std::uint64_t seed = 1;
  std::vector<Variant> variants{Variant::PointNull, Variant::PeriNull};
  QuadratureConfig quadrature;

  // Parameters of the variants that need more than kappa0 / kappa1. The
  // interval-null and shrinking variants use kappa1 as the encompassing /
  // alternative scale.
  double interval_a = 0.1;
  double xi = 0.5;
  double shrink_c = 0.5;

  // Nested: within a replication the sample at each n extends the sample at
  // the previous grid point. Otherwise every (replication, n) draws afresh.
  bool nested = true;
  // Two-sample: n observations per group, group means mu and 0.
  Design design = Design::OneSample;
  int workers = 1;
  bool keep_replicates = false;
};

void validate(const SimConfig& cfg);

struct CellSummary {
  Variant variant = Variant::PointNull;
  long n = 0;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  int ok = 0;
  int failed = 0;
  std::vector<double> log_bfs;  // per replication, NaN when failed; kept on request
};

struct OverlayRow {
  long n = 0;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

struct CrossingRecord {
  Variant variant = Variant::PointNull;
  double bound = 0.0;
  std::optional<double> n;
};

struct SimResult {
  SimConfig config;
  std::vector<CellSummary> cells;  // variant-major, n ascending within variant
  std::vector<OverlayRow> overlay;  // peri-null asymptotic curve
  std::vector<CrossingRecord> crossings;
  long failed_evaluations = 0;
  long total_evaluations = 0;
  bool run_failed = false;  // more than 1% of evaluations failed

  const CellSummary& cell(Variant v, long n) const;
  std::vector<CellSummary> curve(Variant v) const;
};

// Replications run on cfg.workers threads; the reduction is in replication
// order, so the result does not depend on the number of workers.
SimResult run_simulation(const SimConfig& cfg);

// Asymptotic mean and 2.5% / 97.5% quantiles of log BF1~0 per grid n; grid
// points below the bracket threshold are omitted.
std::vector<OverlayRow> overlay_asymptotics(const SimConfig& cfg);

// First grid crossing of `bound` by the variant's mean curve, linearly
// interpolated in n. A curve starting below the bound is searched for an
// upward crossing, one starting above for a downward crossing.
std::optional<double> detect_crossing(const SimResult& result, Variant variant, double bound);

// Type-7 (linear interpolation) empirical quantile of unsorted data.
double empirical_quantile(std::vector<double> values, double p);

// Parses "a:b:step" into an inclusive ascending grid.
std::vector<long> parse_grid(const std::string& spec);

}  // namespace perinull
