#include "perinull/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <vector>

#include "perinull/core.hpp"

namespace perinull {

void validate(const QuadratureConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) throw InvalidInput("quadrature tolerances must be positive");
  if (cfg.max_subdivisions < 1) throw InvalidInput("max_subdivisions must be at least 1");
  if (!(cfg.domain_halfwidth_sd > 0.0)) throw InvalidInput("domain_halfwidth_sd must be positive");
}

namespace {

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  double err = 0.0;
  const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
  return Panel{a, b, v, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints, double abs_tol,
                                    double rel_tol, int max_subdivisions) {
  if (breakpoints.size() < 2) throw InvalidInput("integration needs at least two breakpoints");
  std::priority_queue<Panel> panels;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    Panel p = evaluate_panel(f, breakpoints[i], breakpoints[i + 1]);
    total += p.value;
    total_err += p.error;
    panels.push(p);
  }
  QuadratureResult out;
  if (panels.empty()) {
    out.converged = true;
    return out;
  }

  auto done = [&] { return total_err <= std::max(abs_tol, rel_tol * std::abs(total)); };
  while (!done() && static_cast<int>(panels.size()) < max_subdivisions) {
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot bisect further
    panels.pop();
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  out.value = 0.0;
  out.error = 0.0;
  out.subdivisions = static_cast<int>(panels.size());
  while (!panels.empty()) {
    out.value += panels.top().value;
    out.error += panels.top().error;
    panels.pop();
  }
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

}  // namespace perinull
