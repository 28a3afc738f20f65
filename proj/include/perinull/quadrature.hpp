#pragma once

#include <functional>
#include <span>

namespace perinull {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;
  // Integration is truncated at this many prior scale units from zero; the
  // neglected tail mass is added to the reported error.
  double domain_halfwidth_sd = 20.0;
};

void validate(const QuadratureConfig& cfg);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod (G10/K21) integration over the partition
// given by `breakpoints` (ascending, at least two entries). The panel with the
// largest error estimate is bisected until the summed error drops below
// max(abs_tol, rel_tol * |value|) or max_subdivisions panels are in use.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints, double abs_tol,
                                    double rel_tol, int max_subdivisions);

}  // namespace perinull
