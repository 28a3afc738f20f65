#include "perinull/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "perinull/asymptotics.hpp"
#include "perinull/bf_engine.hpp"

namespace perinull {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::PointNull: return "point";
    case Variant::PeriNull: return "peri";
    case Variant::IntervalNull: return "interval";
    case Variant::PeriPoint: return "peripoint";
    case Variant::Shrinking: return "shrinking";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "point") return Variant::PointNull;
  if (name == "peri") return Variant::PeriNull;
  if (name == "interval") return Variant::IntervalNull;
  if (name == "peripoint") return Variant::PeriPoint;
  if (name == "shrinking") return Variant::Shrinking;
  throw InvalidInput("unknown variant '" + name + "'");
}

void validate(const SimConfig& cfg) {
  if (!std::isfinite(cfg.mu)) throw InvalidInput("mu must be finite");
  if (!(cfg.sigma > 0.0)) throw InvalidInput("sigma must be positive");
  if (!(cfg.kappa0 > 0.0) || !(cfg.kappa1 > 0.0)) throw InvalidInput("prior scales must be positive");
  if (cfg.n_grid.empty()) throw InvalidInput("n_grid must not be empty");
  if (cfg.n_grid.front() < 2) throw InvalidInput("n_grid values must be at least 2");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw InvalidInput("n_grid must be strictly ascending");
  }
  if (cfg.replications < 1) throw InvalidInput("replications must be at least 1");
  if (cfg.variants.empty()) throw InvalidInput("at least one variant is required");
  if (cfg.workers < 1) throw InvalidInput("workers must be at least 1");
  if (!(cfg.interval_a > 0.0)) throw InvalidInput("interval half-width must be positive");
  if (!(cfg.xi > 0.0 && cfg.xi < 1.0)) throw InvalidInput("xi must lie in (0, 1)");
  if (!(cfg.shrink_c > 0.0)) throw InvalidInput("shrinkage constant must be positive");
  validate(cfg.quadrature);
}

namespace {

// Running mean and sum of squared deviations.
struct Welford {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double var() const { return m2 / static_cast<double>(n - 1); }
};

std::mt19937_64 make_engine(std::uint64_t seed, long rep, long n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(n)};
  return std::mt19937_64(seq);
}

// Draws until each group has `target` observations.
void extend(std::mt19937_64& eng, const SimConfig& cfg, long target, Welford& g1, Welford& g2) {
  std::normal_distribution<double> z(0.0, 1.0);
  while (g1.n < target) {
    g1.add(cfg.mu + cfg.sigma * z(eng));
    if (cfg.design == Design::TwoSample) g2.add(cfg.sigma * z(eng));
  }
}

SummaryStats stats_from(const SimConfig& cfg, long n, const Welford& g1, const Welford& g2) {
  if (cfg.design == Design::OneSample) {
    return ingest_one_sample(std::sqrt(static_cast<double>(n)) * g1.mean / std::sqrt(g1.var()), n);
  }
  const double pooled = 0.5 * (g1.var() + g2.var());
  const double t = (g1.mean - g2.mean) / std::sqrt(pooled * 2.0 / static_cast<double>(n));
  return two_sample_from_t(t, n, n);
}

// Every variant's log BF for one data set. Marginals shared between variants
// are computed once.
std::vector<double> evaluate_variants(const SimConfig& cfg, const SummaryStats& stats, long& failures) {
  std::map<std::string, double> memo;
  auto marginal = [&](const PriorSpec& p) {
    const std::string key = describe(p);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double v = marginal_loglik(stats, p, cfg.quadrature).log_value;
    memo.emplace(key, v);
    return v;
  };
  std::vector<double> out;
  out.reserve(cfg.variants.size());
  for (Variant v : cfg.variants) {
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      const double alt = v == Variant::IntervalNull ? 0.0 : marginal(AltCauchy{cfg.kappa1});
      switch (v) {
        case Variant::PointNull: value = alt - marginal(PointAtZero{}); break;
        case Variant::PeriNull: value = alt - marginal(PeriNullNormal{cfg.kappa0}); break;
        case Variant::PeriPoint: value = alt - marginal(PeriPointMixture{cfg.xi, cfg.kappa0}); break;
        case Variant::Shrinking:
          value = alt - marginal(resolve(ShrinkingPeriNull{cfg.shrink_c}, stats));
          break;
        case Variant::IntervalNull:
          value = marginal(TruncatedCauchy{cfg.kappa1, cfg.interval_a, Region::Outside}) -
                  marginal(TruncatedCauchy{cfg.kappa1, cfg.interval_a, Region::Inside});
          break;
      }
      if (!std::isfinite(value)) throw ConvergenceError("non-finite log Bayes factor", value, 0.0);
    } catch (const ConvergenceError&) {
      value = std::numeric_limits<double>::quiet_NaN();
      ++failures;
    } catch (const DegeneratePrior&) {
      value = std::numeric_limits<double>::quiet_NaN();
      ++failures;
    }
    out.push_back(value);
  }
  return out;
}

// One replication: [n index][variant index] log BFs.
std::vector<std::vector<double>> run_replication(const SimConfig& cfg, long rep, long& failures) {
  std::vector<std::vector<double>> rows;
  rows.reserve(cfg.n_grid.size());
  Welford g1, g2;
  std::mt19937_64 eng = make_engine(cfg.seed, rep, 0);
  for (long n : cfg.n_grid) {
    if (!cfg.nested) {
      g1 = Welford{};
      g2 = Welford{};
      eng = make_engine(cfg.seed, rep, n);
    }
    extend(eng, cfg, n, g1, g2);
    rows.push_back(evaluate_variants(cfg, stats_from(cfg, n, g1, g2), failures));
  }
  return rows;
}

}  // namespace

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

const CellSummary& SimResult::cell(Variant v, long n) const {
  for (const CellSummary& c : cells)
    if (c.variant == v && c.n == n) return c;
  throw InvalidInput("no cell for variant " + to_string(v) + " at n = " + std::to_string(n));
}

std::vector<CellSummary> SimResult::curve(Variant v) const {
  std::vector<CellSummary> out;
  for (const CellSummary& c : cells)
    if (c.variant == v) out.push_back(c);
  return out;
}

SimResult run_simulation(const SimConfig& cfg) {
  validate(cfg);
  const long reps = cfg.replications;
  std::vector<std::vector<std::vector<double>>> per_rep(reps);
  std::vector<long> per_rep_failures(reps, 0);

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (long r = next++; r < reps; r = next++) {
      try {
        per_rep[r] = run_replication(cfg, r, per_rep_failures[r]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<long>(cfg.workers, reps);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SimResult result;
  result.config = cfg;
  for (long f : per_rep_failures) result.failed_evaluations += f;
  result.total_evaluations = reps * static_cast<long>(cfg.n_grid.size() * cfg.variants.size());
  result.run_failed = result.failed_evaluations > 0.01 * static_cast<double>(result.total_evaluations);

  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
      CellSummary c;
      c.variant = cfg.variants[vi];
      c.n = cfg.n_grid[ni];
      std::vector<double> ok;
      ok.reserve(reps);
      double sum = 0.0;
      for (long r = 0; r < reps; ++r) {
        const double v = per_rep[r][ni][vi];
        if (cfg.keep_replicates) c.log_bfs.push_back(v);
        if (std::isnan(v)) {
          ++c.failed;
          continue;
        }
        ok.push_back(v);
        sum += v;
      }
      c.ok = static_cast<int>(ok.size());
      c.mean = ok.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(ok.size());
      c.q025 = empirical_quantile(ok, 0.025);
      c.q975 = empirical_quantile(std::move(ok), 0.975);
      result.cells.push_back(std::move(c));
    }
  }
  result.overlay = overlay_asymptotics(cfg);
  return result;
}

std::vector<OverlayRow> overlay_asymptotics(const SimConfig& cfg) {
  std::vector<OverlayRow> rows;
  for (long n : cfg.n_grid) {
    const SamplingDistribution d =
        sampling_distribution(cfg.mu, cfg.sigma, cfg.kappa0, cfg.kappa1, static_cast<double>(n));
    if (!d.usable()) continue;
    rows.push_back({n, d.mean(), d.quantile(0.025), d.quantile(0.975)});
  }
  return rows;
}

std::optional<double> detect_crossing(const SimResult& result, Variant variant, double bound) {
  std::vector<CellSummary> curve = result.curve(variant);
  curve.erase(std::remove_if(curve.begin(), curve.end(), [](const CellSummary& c) { return std::isnan(c.mean); }),
              curve.end());
  if (curve.size() < 2) return std::nullopt;
  if (curve.front().mean == bound) return static_cast<double>(curve.front().n);
  const bool upward = curve.front().mean < bound;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double a = curve[i - 1].mean;
    const double b = curve[i].mean;
    const bool crossed = upward ? b >= bound : b <= bound;
    if (!crossed) continue;
    const double frac = (bound - a) / (b - a);
    return static_cast<double>(curve[i - 1].n) + frac * static_cast<double>(curve[i].n - curve[i - 1].n);
  }
  return std::nullopt;
}

std::vector<long> parse_grid(const std::string& spec) {
  std::vector<long> out;
  std::stringstream ss(spec);
  std::string part;
  std::vector<long> fields;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      fields.push_back(std::stol(part, &used));
      if (used != part.size()) throw InvalidInput("bad grid");
    } catch (const std::exception&) {
      throw InvalidInput("grid must look like nmin:nmax:step, got '" + spec + "'");
    }
  }
  if (fields.size() == 1) return {fields[0]};
  if (fields.size() != 3 || fields[2] <= 0 || fields[1] < fields[0]) {
    throw InvalidInput("grid must look like nmin:nmax:step with step > 0, got '" + spec + "'");
  }
  for (long n = fields[0]; n <= fields[1]; n += fields[2]) out.push_back(n);
  return out;
}

}  // namespace perinull
