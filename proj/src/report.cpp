#include "perinull/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

namespace perinull {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

// JSON has no NaN; unavailable numbers become null.
nlohmann::json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

nlohmann::json to_json(const BFResult& r) {
  nlohmann::json j;
  j["log_bf"] = num(r.log_bf);
  j["bf"] = num(r.bf);
  j["point_null_log_bf"] = r.point_null_log_bf ? num(*r.point_null_log_bf) : nlohmann::json(nullptr);
  j["correction_log_bf"] = r.correction_log_bf ? num(*r.correction_log_bf) : nlohmann::json(nullptr);
  j["posterior_prob_numerator"] = num(r.posterior_prob_numerator);
  j["prior_odds"] = num(r.prior_odds);
  j["quad_error_bound"] = num(r.quad_error_bound);
  return j;
}

nlohmann::json to_json(const CConstants& c) {
  return {{"c1_alt", num(c.c1_alt)}, {"c2_alt", num(c.c2_alt)}, {"c1_peri", num(c.c1_peri)}, {"c2_peri", num(c.c2_peri)}};
}

nlohmann::json to_json(const AsymptoticSummary& s) {
  nlohmann::json j;
  j["mu"] = s.mu;
  j["sigma"] = s.sigma;
  j["kappa0"] = s.kappa0;
  j["kappa1"] = s.kappa1;
  j["n"] = s.n;
  j["limit_log_bf"] = num(s.limit_log_bf);
  j["grad"] = {num(s.grad(0)), num(s.grad(1))};
  j["hessian_mu_mu"] = num(s.hessian_mu_mu);
  j["variance_over_n"] = num(s.variance_over_n);
  j["c_constants"] = to_json(s.c);
  j["bias"] = {{"valid", s.bias.valid},
               {"value", num(s.bias.value)},
               {"failed", to_string(s.bias.failed)},
               {"bracket_alt", num(s.bias.bracket_alt)},
               {"bracket_peri", num(s.bias.bracket_peri)},
               {"min_valid_n", s.bias.min_valid_n}};
  j["regime"] = to_string(s.regime);
  return j;
}

nlohmann::json to_json(const LaplaceResult& r) {
  return {{"leading", num(r.leading)},     {"with_c1", num(r.with_c1)},   {"with_c2", num(r.with_c2)},
          {"c1", num(r.c1)},               {"c2", num(r.c2)},             {"bracket1", num(r.bracket1)},
          {"bracket2", num(r.bracket2)},   {"valid", r.valid}};
}

void write_curves_csv(const SimResult& result, std::ostream& out) {
  out << "variant,n,mean,q025,q975,source\n";
  for (const CellSummary& c : result.cells) {
    out << to_string(c.variant) << ',' << c.n << ',' << format_double(c.mean) << ',' << format_double(c.q025)
        << ',' << format_double(c.q975) << ",simulated\n";
  }
  for (const OverlayRow& r : result.overlay) {
    out << "peri," << r.n << ',' << format_double(r.mean) << ',' << format_double(r.q025) << ','
        << format_double(r.q975) << ",asymptotic\n";
  }
}

RunManifest make_manifest(std::string command, std::map<std::string, std::string> parameters,
                          std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.parameters = std::move(parameters);
  m.seed = seed;
  m.version = PERINULL_VERSION;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  m.timestamp = buf;
  return m;
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"parameters", m.parameters},
          {"seed", m.seed},
          {"version", m.version},
          {"timestamp", m.timestamp}};
}

std::string plot_script(const std::string& csv_name) {
  return "# gnuplot script: log Bayes factor curves\n"
         "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'n'\n"
         "set ylabel 'log BF'\n"
         "set terminal pngcairo size 900,600\n"
         "set output 'curves.png'\n"
         "sel(v, s, col) = (strcol(1) eq v && strcol(6) eq s) ? column(col) : 1/0\n"
         "plot for [v in 'point peri interval peripoint shrinking'] '" +
         csv_name +
         "' using 2:(sel(v, 'simulated', 3)) with lines title v.' mean', \\\n"
         "     for [v in 'point peri interval peripoint shrinking'] '" +
         csv_name +
         "' using 2:(sel(v, 'simulated', 4)) with lines dt 3 notitle, \\\n"
         "     for [v in 'point peri interval peripoint shrinking'] '" +
         csv_name +
         "' using 2:(sel(v, 'simulated', 5)) with lines dt 3 notitle, \\\n"
         "     '" + csv_name + "' using 2:(sel('peri', 'asymptotic', 3)) with lines lc rgb 'red' title 'asymptotic mean', \\\n"
         "     '" + csv_name + "' using 2:(sel('peri', 'asymptotic', 4)) with lines lc rgb 'red' dt 3 notitle, \\\n"
         "     '" + csv_name + "' using 2:(sel('peri', 'asymptotic', 5)) with lines lc rgb 'red' dt 3 notitle\n";
}

}  // namespace perinull
