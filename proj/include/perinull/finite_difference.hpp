#pragma once

// Numerical partial derivatives up to order 6 in one or two dimensions.
//
// Each mixed partial d^{c0}_x d^{c1}_y f is a tensor product of centered
// difference stencils, whose truncation error is a series in even powers of
// the step. The step is halved repeatedly and the estimates are combined in
// a Neville tableau (Ridders' method); the reported error is the larger of
// the tableau's own estimate and a rounding-error bound for the stencil.

#include <array>
#include <functional>
#include <optional>
#include <span>

#include "perinull/laplace.hpp"
#include "perinull/tensor.hpp"

namespace perinull {

using ScalarFunction = std::function<double(std::span<const double>)>;

struct DerivativeSet {
  double value = 0.0;  // f at the point
  // values[k] / errors[k] hold the order-k derivatives and their estimated
  // absolute errors, for k = 1..max_order.
  std::array<std::optional<SymmetricTensor>, 7> values;
  std::array<std::optional<SymmetricTensor>, 7> errors;
};

// Throws UnsupportedOrder for dim > 2 or max_order > 6, InvalidInput for an
// empty point or a non-finite function value anywhere in a stencil.
DerivativeSet finite_difference_derivatives(const ScalarFunction& f, std::span<const double> point,
                                            int max_order);

// Single partial derivative with error estimate.
struct PartialEstimate {
  double value = 0.0;
  double error = 0.0;
};
PartialEstimate finite_difference_partial(const ScalarFunction& f, std::span<const double> point,
                                          const IndexCounts& counts);

// Oracles for the Laplace expansion built from plain function values.
// `h` is the per-observation negative log-likelihood; the log-likelihood at
// the expansion point is reported as -n * h. `density` is the prior density.
LikelihoodOracle fd_likelihood_oracle(ScalarFunction h, double n);
PriorOracle fd_prior_oracle(ScalarFunction density);

}  // namespace perinull
