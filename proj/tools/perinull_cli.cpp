// perinull: Bayes factors, asymptotics, simulation and Laplace checks for the
// peri-null t-test.
//
// Exit codes: 0 success (flagged-but-valid output included), 2 usage error,
// 3 numerical failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "perinull/asymptotics.hpp"
#include "perinull/bf_engine.hpp"
#include "perinull/core.hpp"
#include "perinull/laplace.hpp"
#include "perinull/laplace_models.hpp"
#include "perinull/report.hpp"
#include "perinull/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perinull;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// Config values fill options not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : read_config(path)) {
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key '" + key + "' for command " + sub->get_name());
    }
    if (opt->count() > 0) continue;
    std::istringstream ss(value);
    std::string item;
    while (ss >> item) opt->add_result(item);
    opt->run_callback();
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PERINULL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("PERINULL_SEED must be an unsigned integer");
    }
  }
  return 1;
}

std::string fmt(double x, int digits = 6) {
  if (!std::isfinite(x)) return format_double(x);
  std::ostringstream os;
  os << std::setprecision(digits) << x + 0.0;  // no "-0"
  return os.str();
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  std::ofstream out(dir / "manifest.json");
  out << to_json(m).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed to write manifest");
}

// ---------------------------------------------------------------------------
// bf
// ---------------------------------------------------------------------------

struct BfArgs {
  std::optional<double> t;
  std::optional<long> n, n1, n2;
  std::vector<double> summary;
  std::string design;
  std::string variant = "point";
  double kappa0 = 0.05;
  double kappa1 = 1.0 / std::numbers::sqrt2;
  double a = 0.1;
  double xi = 0.5;
  double c = 0.5;
  double prior_odds = 1.0;
  bool json = false;
  QuadratureConfig quad;
  std::string config;
};

SummaryStats bf_stats(const BfArgs& a) {
  if (!a.summary.empty()) {
    if (a.n || a.n1 || a.n2) throw UsageError("--summary cannot be combined with --n, --n1 or --n2");
    if (a.design == "one-sample") throw UsageError("--summary describes a two-sample design");
    if (a.summary[2] != std::floor(a.summary[2]) || a.summary[5] != std::floor(a.summary[5])) {
      throw UsageError("--summary group sizes must be integers");
    }
    const long n1 = static_cast<long>(a.summary[2]);
    const long n2 = static_cast<long>(a.summary[5]);
    SummaryStats s = ingest_two_sample(a.summary[0], a.summary[1], n1, a.summary[3], a.summary[4], n2);
    if (a.t) s.t = *a.t;  // an explicit t overrides the one implied by the summaries
    return s;
  }
  if (!a.t) throw UsageError("bf needs --t or --summary");
  if (a.n) {
    if (a.n1 || a.n2) throw UsageError("--n cannot be combined with --n1/--n2");
    if (a.design == "two-sample") throw UsageError("two-sample design needs --n1 and --n2");
    return ingest_one_sample(*a.t, *a.n);
  }
  if (a.n1 && a.n2) {
    if (a.design == "one-sample") throw UsageError("one-sample design needs --n");
    return two_sample_from_t(*a.t, *a.n1, *a.n2);
  }
  throw UsageError("--t needs --n (one-sample) or --n1 and --n2 (two-sample)");
}

int run_bf(const BfArgs& a) {
  const SummaryStats s = bf_stats(a);
  BFResult r;
  std::string h1, h0;
  if (a.variant == "point") {
    r = point_null_bf10(s, a.kappa1, a.quad, a.prior_odds);
    h1 = describe(AltCauchy{a.kappa1});
    h0 = describe(PointAtZero{});
  } else if (a.variant == "peri") {
    r = peri_null_bf(s, a.kappa0, a.kappa1, a.quad, a.prior_odds);
    h1 = describe(AltCauchy{a.kappa1});
    h0 = describe(PeriNullNormal{a.kappa0});
  } else if (a.variant == "interval") {
    r = interval_null_bf(s, a.kappa1, a.a, a.quad, a.prior_odds);
    h1 = describe(TruncatedCauchy{a.kappa1, a.a, Region::Outside});
    h0 = describe(TruncatedCauchy{a.kappa1, a.a, Region::Inside});
  } else if (a.variant == "peripoint") {
    r = peri_point_bf(s, a.xi, a.kappa0, a.kappa1, a.quad, a.prior_odds);
    h1 = describe(AltCauchy{a.kappa1});
    h0 = describe(PeriPointMixture{a.xi, a.kappa0});
  } else {
    r = shrinking_peri_null_bf(s, a.c, a.kappa1, a.quad, a.prior_odds);
    h1 = describe(AltCauchy{a.kappa1});
    h0 = describe(resolve(ShrinkingPeriNull{a.c}, s));
  }

  if (a.json) {
    json j;
    j["command"] = "bf";
    j["inputs"] = {{"t", s.t}, {"nu", s.nu}, {"n_eff", s.n_eff}, {"design", to_string(s.design)}, {"n_total", s.n_total}};
    j["variant"] = a.variant;
    j["priors"] = {{"h1", h1}, {"h0", h0}};
    j["result"] = to_json(r);
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  std::cout << "design          " << to_string(s.design) << " (nu = " << fmt(s.nu) << ", n_eff = " << fmt(s.n_eff)
            << ")\n"
            << "t               " << fmt(s.t) << '\n'
            << "variant         " << a.variant << '\n'
            << "H1 prior        " << h1 << '\n'
            << "H0 prior        " << h0 << '\n'
            << "BF              " << std::fixed << std::setprecision(3) << r.bf << std::defaultfloat << '\n'
            << "log BF          " << fmt(r.log_bf) << '\n';
  if (r.point_null_log_bf && r.correction_log_bf) {
    const double b10 = std::exp(*r.point_null_log_bf);
    const double b00 = std::exp(*r.correction_log_bf);
    std::cout << "decomposition   BF10 = " << fmt(b10) << "  x  BF0~0 = " << fmt(b00) << "  =  " << fmt(b10 * b00)
              << "  (direct ratio " << fmt(r.bf) << ")\n";
  }
  std::cout << "posterior prob  " << std::fixed << std::setprecision(3) << r.posterior_prob_numerator
            << std::defaultfloat << " (prior odds " << fmt(r.prior_odds) << ")\n"
            << "quad error      " << fmt(r.quad_error_bound, 3) << " (log scale)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// asymptotics
// ---------------------------------------------------------------------------

struct AsymArgs {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa0 = 0.05;
  double kappa1 = 1.0;
  std::optional<double> n;
  std::string grid;
  std::string out;
  bool json = false;
  std::string config;
};

json distribution_json(const SamplingDistribution& d) {
  json j{{"regime", to_string(d.regime())}, {"usable", d.usable()}};
  if (d.usable()) {
    j["mean"] = d.mean();
    j["sd"] = d.sd();
    j["q025"] = d.quantile(0.025);
    j["q975"] = d.quantile(0.975);
  }
  return j;
}

void write_asymptotic_grid(const AsymArgs& a, const std::vector<long>& grid, std::ostream& out) {
  out << "n,valid,bias,bracket_alt,bracket_peri,mean,sd,q025,q975,regime\n";
  for (long n : grid) {
    const double nn = static_cast<double>(n);
    const BiasTerm e = bias_term(a.mu, a.sigma, a.kappa0, a.kappa1, nn);
    const SamplingDistribution d = sampling_distribution(a.mu, a.sigma, a.kappa0, a.kappa1, nn);
    const double nan = std::nan("");
    out << n << ',' << (e.valid ? "true" : "false") << ',' << format_double(e.value) << ','
        << format_double(e.bracket_alt) << ',' << format_double(e.bracket_peri) << ','
        << format_double(d.usable() ? d.mean() : nan) << ',' << format_double(d.usable() ? d.sd() : nan) << ','
        << format_double(d.usable() ? d.quantile(0.025) : nan) << ','
        << format_double(d.usable() ? d.quantile(0.975) : nan) << ',' << to_string(d.regime()) << '\n';
  }
}

int run_asymptotics(const AsymArgs& a) {
  if (!a.grid.empty()) {
    if (a.n) throw UsageError("--grid and --n are mutually exclusive");
    const std::vector<long> grid = parse_grid(a.grid);
    if (grid.front() < 1) throw UsageError("grid values must be at least 1");
    if (a.out.empty()) {
      write_asymptotic_grid(a, grid, std::cout);
      return 0;
    }
    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::ofstream csv(dir / "asymptotics.csv");
    write_asymptotic_grid(a, grid, csv);
    write_manifest(dir, make_manifest("asymptotics",
                                      {{"mu", format_double(a.mu)},
                                       {"sigma", format_double(a.sigma)},
                                       {"kappa0", format_double(a.kappa0)},
                                       {"kappa1", format_double(a.kappa1)},
                                       {"grid", a.grid}},
                                      0));
    std::cout << "wrote " << (dir / "asymptotics.csv").string() << '\n';
    return 0;
  }

  const double n = a.n.value_or(1.0);
  const AsymptoticSummary s = summarize(a.mu, a.sigma, a.kappa0, a.kappa1, n);
  const double chi_coef = chi_square_coefficient(a.kappa0, a.kappa1);
  std::optional<SamplingDistribution> dist;
  if (a.n) dist = sampling_distribution(a.mu, a.sigma, a.kappa0, a.kappa1, n);

  if (a.json) {
    json j = to_json(s);
    j["command"] = "asymptotics";
    j["chi_square_coefficient"] = chi_coef;
    if (!a.n) {
      j.erase("n");
      j.erase("bias");
      j["min_valid_n"] = s.bias.min_valid_n;
    } else {
      j["variance"] = s.variance_over_n / n;
      j["distribution"] = distribution_json(*dist);
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  std::cout << "theta           (mu = " << fmt(a.mu) << ", sigma = " << fmt(a.sigma) << "), delta = "
            << fmt(a.mu / a.sigma) << '\n'
            << "priors          kappa0 = " << fmt(a.kappa0) << ", kappa1 = " << fmt(a.kappa1) << '\n'
            << "limit log BF    " << std::fixed << std::setprecision(3) << s.limit_log_bf << std::defaultfloat
            << "  (BF " << fmt(std::exp(s.limit_log_bf)) << ")\n"
            << "gradient        (" << fmt(s.grad(0)) << ", " << fmt(s.grad(1)) << ")\n"
            << "hessian mu,mu   " << fmt(s.hessian_mu_mu) << '\n'
            << "n * variance    " << fmt(s.variance_over_n) << '\n'
            << "C1 alt          " << fmt(s.c.c1_alt) << '\n'
            << "C2 alt          " << fmt(s.c.c2_alt) << '\n'
            << "C1 peri         " << fmt(s.c.c1_peri) << '\n'
            << "C2 peri         " << fmt(s.c.c2_peri) << '\n'
            << "regime          " << to_string(s.regime) << '\n'
            << "chi2 coef       " << fmt(chi_coef) << '\n'
            << "min valid n     " << s.bias.min_valid_n << '\n';
  if (a.n) {
    std::cout << "n               " << fmt(n) << '\n';
    if (s.bias.valid) {
      std::cout << "bias E(theta,n) " << fmt(s.bias.value) << '\n';
    } else {
      std::cout << "bias E(theta,n) invalid (" << to_string(s.bias.failed) << " bracket nonpositive: alt "
                << fmt(s.bias.bracket_alt) << ", peri " << fmt(s.bias.bracket_peri) << ")\n";
    }
    if (dist->usable()) {
      std::cout << "distribution    mean " << fmt(dist->mean()) << ", sd " << fmt(dist->sd()) << ", 95% ["
                << fmt(dist->quantile(0.025)) << ", " << fmt(dist->quantile(0.975)) << "]\n";
    } else {
      std::cout << "distribution    unavailable below n = " << s.bias.min_valid_n << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimArgs {
  double mu = 0.167;
  double sigma = 1.0;
  double kappa0 = 0.05;
  double kappa1 = 1.0;
  std::string ngrid = "100:2000:100";
  int reps = 50;
  std::optional<std::uint64_t> seed;
  std::string variants = "point,peri";
  std::string out = "perinull_out";
  int workers = 1;
  double a = 0.1;
  double xi = 0.5;
  double c = 0.5;
  bool independent = false;
  std::string design = "one-sample";
  std::vector<double> bounds;
  bool emit_plotscript = false;
  bool json = false;
  std::string config;
};

int run_simulate(const SimArgs& a) {
  SimConfig cfg;
  cfg.mu = a.mu;
  cfg.sigma = a.sigma;
  cfg.kappa0 = a.kappa0;
  cfg.kappa1 = a.kappa1;
  cfg.n_grid = parse_grid(a.ngrid);
  cfg.replications = a.reps;
  cfg.seed = a.seed.value_or(default_seed());
  cfg.variants.clear();
  std::stringstream ss(a.variants);
  std::string v;
  while (std::getline(ss, v, ',')) cfg.variants.push_back(parse_variant(v));
  cfg.workers = a.workers;
  cfg.interval_a = a.a;
  cfg.xi = a.xi;
  cfg.shrink_c = a.c;
  cfg.nested = !a.independent;
  cfg.design = a.design == "two-sample" ? Design::TwoSample : Design::OneSample;
  validate(cfg);

  SimResult r = run_simulation(cfg);
  for (double b : a.bounds) {
    for (Variant var : cfg.variants) r.crossings.push_back({var, b, detect_crossing(r, var, b)});
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "curves.csv", std::ios::binary);
    write_curves_csv(r, csv);
  }
  if (a.emit_plotscript) {
    std::ofstream gp(dir / "plot.gp");
    gp << plot_script("curves.csv");
  }
  std::map<std::string, std::string> params{
      {"mu", format_double(a.mu)},       {"sigma", format_double(a.sigma)},
      {"kappa0", format_double(a.kappa0)}, {"kappa1", format_double(a.kappa1)},
      {"ngrid", a.ngrid},                 {"reps", std::to_string(a.reps)},
      {"variants", a.variants},           {"workers", std::to_string(a.workers)},
      {"a", format_double(a.a)},          {"xi", format_double(a.xi)},
      {"c", format_double(a.c)},          {"sampling", a.independent ? "independent" : "nested"},
      {"design", a.design}};
  write_manifest(dir, make_manifest("simulate", params, cfg.seed));

  if (a.json) {
    json j;
    j["command"] = "simulate";
    j["seed"] = cfg.seed;
    j["failed_evaluations"] = r.failed_evaluations;
    j["total_evaluations"] = r.total_evaluations;
    j["run_failed"] = r.run_failed;
    j["cells"] = json::array();
    for (const CellSummary& c : r.cells) {
      j["cells"].push_back({{"variant", to_string(c.variant)},
                            {"n", c.n},
                            {"mean", std::isfinite(c.mean) ? json(c.mean) : json(nullptr)},
                            {"q025", std::isfinite(c.q025) ? json(c.q025) : json(nullptr)},
                            {"q975", std::isfinite(c.q975) ? json(c.q975) : json(nullptr)},
                            {"ok", c.ok},
                            {"failed", c.failed}});
    }
    j["crossings"] = json::array();
    for (const CrossingRecord& c : r.crossings) {
      j["crossings"].push_back({{"variant", to_string(c.variant)},
                                {"bound", c.bound},
                                {"n", c.n ? json(*c.n) : json(nullptr)}});
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "wrote " << (dir / "curves.csv").string() << " and " << (dir / "manifest.json").string() << '\n'
              << "evaluations     " << r.total_evaluations << " (" << r.failed_evaluations << " failed)\n";
    for (const CrossingRecord& c : r.crossings) {
      std::cout << "crossing        " << to_string(c.variant) << " vs " << fmt(c.bound) << ": "
                << (c.n ? fmt(*c.n) : std::string("none in grid")) << '\n';
    }
  }
  if (r.run_failed) {
    std::cerr << "error: " << r.failed_evaluations << " of " << r.total_evaluations
              << " Bayes factor evaluations failed (more than 1%)\n";
    return kExitNumerical;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// laplace-verify
// ---------------------------------------------------------------------------

struct LaplaceArgs {
  std::string model = "conjugate-gaussian";
  std::vector<double> theta;
  std::optional<long> n;
  double kappa0 = 0.05;
  double kappa1 = 1.0;
  std::string derivatives = "analytic";
  bool json = false;
  std::string config;
};

int run_laplace_verify(const LaplaceArgs& a) {
  const DerivativeSource src =
      a.derivatives == "fd" ? DerivativeSource::FiniteDifference : DerivativeSource::Analytic;
  LaplaceModel m;
  const bool ttest = a.model == "ttest-peri" || a.model == "ttest-alt";
  std::vector<double> theta = a.theta;
  if (a.model == "conjugate-gaussian") {
    const long n = a.n.value_or(100);
    if (theta.size() > 1) throw UsageError("conjugate-gaussian takes one --theta value (ybar)");
    m = conjugate_gaussian_model(static_cast<double>(n), theta.empty() ? 0.3 : theta[0], 1.0, 0.0, 20.0);
  } else if (a.model == "beta-bernoulli") {
    const long n = a.n.value_or(50);
    if (theta.size() > 1) throw UsageError("beta-bernoulli takes one --theta value (success fraction)");
    const double k = std::round((theta.empty() ? 0.4 : theta[0]) * static_cast<double>(n));
    m = beta_bernoulli_model(static_cast<double>(n), k, 2.0, 2.0);
  } else if (a.model == "gamma-poisson") {
    const long n = a.n.value_or(50);
    if (theta.size() > 1) throw UsageError("gamma-poisson takes one --theta value (mean count)");
    m = gamma_poisson_model(static_cast<double>(n), (theta.empty() ? 2.0 : theta[0]) * static_cast<double>(n), 2.0,
                            1.0);
  } else if (ttest) {
    const long n = a.n.value_or(500);
    if (theta.empty()) theta = {0.0, 1.0};
    if (theta.size() != 2) throw UsageError("t-test models take --theta mu sigma");
    const bool peri = a.model == "ttest-peri";
    m = ttest_model(peri ? TTestPrior::Peri : TTestPrior::Alt, peri ? a.kappa0 : a.kappa1, n, theta[0], theta[1], src);
  } else {
    throw UsageError("unknown model '" + a.model + "'");
  }
  if (!ttest && src == DerivativeSource::FiniteDifference) {
    throw UsageError("finite-difference derivatives are available for the t-test models only");
  }

  const LaplaceResult r = laplace_marginal(m.likelihood, m.prior, m.mle, m.n);
  const double exact = m.exact_log_marginal;
  std::optional<CConstants> closed;
  if (ttest) closed = c_constants(m.mle[0], m.mle[1], a.kappa0, a.kappa1);

  auto err = [&](double approx) { return approx - exact; };
  if (a.json) {
    json j;
    j["command"] = "laplace-verify";
    j["model"] = m.name;
    j["theta"] = m.mle;
    j["n"] = m.n;
    j["derivatives"] = a.derivatives;
    j["expansion"] = to_json(r);
    j["exact"] = exact;
    j["exact_source"] = m.exact_source;
    auto e = [&](double x) { return std::isfinite(x) ? json(x - exact) : json(nullptr); };
    j["abs_error"] = {{"leading", e(r.leading)}, {"with_c1", e(r.with_c1)}, {"with_c2", e(r.with_c2)}};
    if (closed) j["closed_form"] = to_json(*closed);
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  std::cout << "model           " << m.name << " (n = " << fmt(m.n) << ", theta =";
  for (double t : m.mle) std::cout << ' ' << fmt(t);
  std::cout << ", derivatives " << a.derivatives << ")\n"
            << "exact           " << std::setprecision(12) << exact << std::defaultfloat << " (" << m.exact_source
            << ")\n"
            << "C1              " << fmt(r.c1, 8) << '\n'
            << "C2              " << fmt(r.c2, 8) << '\n';
  std::cout << "level        log marginal          abs error     rel error\n";
  auto row = [&](const char* name, double v) {
    std::cout << std::left << std::setw(13) << name << std::right << std::setw(20) << std::setprecision(12) << v
              << std::setw(14) << std::setprecision(3) << err(v) << std::setw(14)
              << std::abs(err(v) / exact) << std::defaultfloat << '\n';
  };
  row("leading", r.leading);
  row("with_c1", r.with_c1);
  row("with_c2", r.with_c2);
  if (!r.valid) {
    std::cout << "invalid expansion: bracket 1 + C1/n = " << fmt(r.bracket1) << ", 1 + C1/n + C2/n^2 = "
              << fmt(r.bracket2) << '\n';
  }
  if (closed) {
    const bool peri = a.model == "ttest-peri";
    std::cout << "closed form     C1 = " << fmt(peri ? closed->c1_peri : closed->c1_alt, 8)
              << ", C2 = " << fmt(peri ? closed->c2_peri : closed->c2_alt, 8) << '\n';
  }
  return 0;
}

void add_quadrature_options(CLI::App* sub, QuadratureConfig& q) {
  sub->add_option("--rel-tol", q.rel_tol, "Relative quadrature tolerance")->capture_default_str();
  sub->add_option("--max-subdivisions", q.max_subdivisions, "Quadrature panel limit")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peri-null and point-null Bayes factors for the t-test"};
  app.set_version_flag("--version", std::string(PERINULL_VERSION));
  app.require_subcommand(1);

  BfArgs bf;
  auto* bf_cmd = app.add_subcommand("bf", "Compute a Bayes factor from a t statistic or group summaries");
  bf_cmd->add_option("--t", bf.t, "t statistic");
  bf_cmd->add_option("--n", bf.n, "Sample size (one-sample design)");
  bf_cmd->add_option("--n1", bf.n1, "Group 1 size (two-sample design)");
  bf_cmd->add_option("--n2", bf.n2, "Group 2 size (two-sample design)");
  bf_cmd->add_option("--summary", bf.summary, "m1 sd1 n1 m2 sd2 n2")->expected(6);
  bf_cmd->add_option("--design", bf.design, "one-sample or two-sample")
      ->check(CLI::IsMember({"one-sample", "two-sample"}));
  bf_cmd->add_option("--variant", bf.variant, "point, peri, interval, peripoint or shrinking")
      ->check(CLI::IsMember({"point", "peri", "interval", "peripoint", "shrinking"}))
      ->capture_default_str();
  bf_cmd->add_option("--kappa0", bf.kappa0, "Peri-null scale")->capture_default_str();
  bf_cmd->add_option("--kappa1", bf.kappa1, "Cauchy alternative scale")->capture_default_str();
  bf_cmd->add_option("--a", bf.a, "Interval half-width")->capture_default_str();
  bf_cmd->add_option("--xi", bf.xi, "Point-mass weight of the peri-point null")->capture_default_str();
  bf_cmd->add_option("--c", bf.c, "Shrinking peri-null constant")->capture_default_str();
  bf_cmd->add_option("--prior-odds", bf.prior_odds, "Prior odds H1 : H0")->capture_default_str();
  bf_cmd->add_flag("--json", bf.json, "JSON output");
  add_quadrature_options(bf_cmd, bf.quad);
  bf_cmd->add_option("--config", bf.config, "key=value defaults file");

  AsymArgs as;
  auto* as_cmd = app.add_subcommand("asymptotics", "Large-sample limit, bias and sampling distribution");
  as_cmd->add_option("--mu", as.mu)->capture_default_str();
  as_cmd->add_option("--sigma", as.sigma)->capture_default_str();
  as_cmd->add_option("--kappa0", as.kappa0)->capture_default_str();
  as_cmd->add_option("--kappa1", as.kappa1)->capture_default_str();
  as_cmd->add_option("--n", as.n, "Sample size for bias and distribution");
  as_cmd->add_option("--grid", as.grid, "nmin:nmax:step; emits CSV");
  as_cmd->add_option("--out", as.out, "Directory for grid CSV and manifest");
  as_cmd->add_flag("--json", as.json, "JSON output");
  as_cmd->add_option("--config", as.config, "key=value defaults file");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo sampling distribution of log Bayes factors");
  sim_cmd->add_option("--mu", sim.mu)->capture_default_str();
  sim_cmd->add_option("--sigma", sim.sigma)->capture_default_str();
  sim_cmd->add_option("--kappa0", sim.kappa0)->capture_default_str();
  sim_cmd->add_option("--kappa1", sim.kappa1)->capture_default_str();
  sim_cmd->add_option("--ngrid", sim.ngrid, "nmin:nmax:step")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed (default: PERINULL_SEED or 1)");
  sim_cmd->add_option("--variants", sim.variants, "Comma-separated variants")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();
  sim_cmd->add_option("--workers", sim.workers, "Worker threads")->capture_default_str();
  sim_cmd->add_option("--a", sim.a, "Interval half-width")->capture_default_str();
  sim_cmd->add_option("--xi", sim.xi, "Point-mass weight of the peri-point null")->capture_default_str();
  sim_cmd->add_option("--c", sim.c, "Shrinking peri-null constant")->capture_default_str();
  sim_cmd->add_flag("--independent", sim.independent, "Fresh sample per grid point instead of nested samples");
  sim_cmd->add_option("--design", sim.design)->check(CLI::IsMember({"one-sample", "two-sample"}))->capture_default_str();
  sim_cmd->add_option("--bound", sim.bounds, "Report where mean curves cross these values");
  sim_cmd->add_flag("--emit-plotscript", sim.emit_plotscript, "Also write a gnuplot script");
  sim_cmd->add_flag("--json", sim.json, "JSON summary on stdout");
  sim_cmd->add_option("--config", sim.config, "key=value defaults file");

  LaplaceArgs lv;
  auto* lv_cmd = app.add_subcommand("laplace-verify", "Compare Laplace truncations with an exact marginal");
  lv_cmd->add_option("--model", lv.model)
      ->check(CLI::IsMember({"conjugate-gaussian", "beta-bernoulli", "gamma-poisson", "ttest-peri", "ttest-alt"}))
      ->capture_default_str();
  lv_cmd->add_option("--theta", lv.theta, "Expansion point (MLE)");
  lv_cmd->add_option("--n", lv.n, "Sample size");
  lv_cmd->add_option("--kappa0", lv.kappa0)->capture_default_str();
  lv_cmd->add_option("--kappa1", lv.kappa1)->capture_default_str();
  lv_cmd->add_option("--derivatives", lv.derivatives, "analytic or fd")
      ->check(CLI::IsMember({"analytic", "fd"}))
      ->capture_default_str();
  lv_cmd->add_flag("--json", lv.json, "JSON output");
  lv_cmd->add_option("--config", lv.config, "key=value defaults file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (bf_cmd->parsed()) {
      apply_config(bf_cmd, bf.config);
      return run_bf(bf);
    }
    if (as_cmd->parsed()) {
      apply_config(as_cmd, as.config);
      return run_asymptotics(as);
    }
    if (sim_cmd->parsed()) {
      apply_config(sim_cmd, sim.config);
      return run_simulate(sim);
    }
    apply_config(lv_cmd, lv.config);
    return run_laplace_verify(lv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << " (estimate " << e.estimate() << ", error bound "
              << e.error_bound() << ")\n";
    return kExitNumerical;
  } catch (const DegeneratePrior& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const UnsupportedOrder& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
