#pragma once

// Laplace expansion of a marginal likelihood to O(n^-2):
//
//   p(y^n) = (2 pi / n)^{p/2} f(y^n | mle) pi(mle) |I(mle)|^{-1/2}
//            * [1 + C1 / n + C2 / n^2 + O(n^-3)]
//
// where h(theta) = -(1/n) sum log f(y_i | theta), I = D^2 h at the MLE, and C1,
// C2 are contractions of the derivative tensors of h (orders 3..6) and of the
// prior (orders 1..4) against Gaussian moments of N(0, I^-1). The integrand
// is assumed to have a single global maximum at the MLE.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "perinull/moments.hpp"
#include "perinull/tensor.hpp"

namespace perinull {

struct TensorCoeffs {
  int dim = 1;
  std::vector<double> mle;
  // h_derivs[k] holds the order-k derivatives of h for k = 2..6.
  std::array<std::optional<SymmetricTensor>, 7> h_derivs;
  double prior_value = 1.0;
  // prior_derivs[k] holds the order-k derivatives of pi for k = 1..4.
  std::array<std::optional<SymmetricTensor>, 5> prior_derivs;

  const SymmetricTensor& h(int order) const;
  const SymmetricTensor& prior(int order) const;

  // Information matrix D^2 h at the MLE.
  Eigen::MatrixXd information() const;

  // Relabels coordinates in every tensor: new coordinate i is old perm[i].
  TensorCoeffs permuted(std::span<const int> perm) const;
};

// Sum over all index tuples of prod_k T_k[indices_k] * E[Q^{all indices}].
double contract(std::initializer_list<const SymmetricTensor*> tensors, const MomentTable& moments);

// Throws InvalidInput when the information matrix is not symmetric positive
// definite or a required derivative order is missing (C1 needs h up to order
// 4 and the prior up to order 2; C2 needs h up to 6 and the prior up to 4).
double laplace_c1(const TensorCoeffs& coeffs);
double laplace_c2(const TensorCoeffs& coeffs);

struct LikelihoodExpansion {
  double log_likelihood = 0.0;  // log f(y^n | mle), summed over observations
  std::array<std::optional<SymmetricTensor>, 7> h_derivs;
};

struct PriorExpansion {
  double value = 1.0;
  std::array<std::optional<SymmetricTensor>, 5> derivs;
};

using LikelihoodOracle = std::function<LikelihoodExpansion(std::span<const double>)>;
using PriorOracle = std::function<PriorExpansion(std::span<const double>)>;

struct LaplaceResult {
  // Log marginal at three truncation levels. with_c1 / with_c2 are NaN when
  // their bracket is not positive; the raw brackets are kept either way.
  double leading = 0.0;
  double with_c1 = 0.0;
  double with_c2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double bracket1 = 1.0;  // 1 + C1/n
  double bracket2 = 1.0;  // 1 + C1/n + C2/n^2
  bool valid = true;
};

TensorCoeffs make_coeffs(const LikelihoodOracle& likelihood, const PriorOracle& prior,
                         std::span<const double> mle, double* log_likelihood = nullptr);

LaplaceResult laplace_marginal(const LikelihoodOracle& likelihood, const PriorOracle& prior,
                               std::span<const double> mle, double n);

}  // namespace perinull
