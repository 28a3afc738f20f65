#include "perinull/laplace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "perinull/core.hpp"

namespace perinull {

const SymmetricTensor& TensorCoeffs::h(int order) const {
  if (order < 2 || order > 6 || !h_derivs[order]) {
    throw InvalidInput("log-likelihood derivatives of order " + std::to_string(order) + " are missing");
  }
  return *h_derivs[order];
}

const SymmetricTensor& TensorCoeffs::prior(int order) const {
  if (order < 1 || order > 4 || !prior_derivs[order]) {
    throw InvalidInput("prior derivatives of order " + std::to_string(order) + " are missing");
  }
  return *prior_derivs[order];
}

Eigen::MatrixXd TensorCoeffs::information() const {
  const SymmetricTensor& h2 = h(2);
  Eigen::MatrixXd m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) m(a, b) = h2(std::array{a, b});
  return m;
}

TensorCoeffs TensorCoeffs::permuted(std::span<const int> perm) const {
  TensorCoeffs out = *this;
  for (int i = 0; i < dim; ++i) out.mle[i] = mle[perm[i]];
  for (auto& t : out.h_derivs)
    if (t) t = t->permuted(perm);
  for (auto& t : out.prior_derivs)
    if (t) t = t->permuted(perm);
  return out;
}

double contract(std::initializer_list<const SymmetricTensor*> tensors, const MomentTable& moments) {
  // The moment depends on the index tuple only through its total counts, so
  // each tensor contributes per distinct sorted multi-index, weighted by the
  // number of orderings.
  std::vector<std::vector<std::pair<IndexCounts, double>>> terms;
  for (const SymmetricTensor* t : tensors) {
    if (t->dim() != moments.dim()) throw InvalidInput("tensor and covariance dimensions differ");
    std::vector<std::pair<IndexCounts, double>> list;
    for (const auto& [c, v] : t->entries()) {
      if (v != 0.0) list.emplace_back(c, v * multiplicity(c));
    }
    if (list.empty()) return 0.0;
    terms.push_back(std::move(list));
  }

  double total = 0.0;
  std::function<void(std::size_t, IndexCounts, double)> walk = [&](std::size_t k, IndexCounts acc,
                                                                   double weight) {
    if (k == terms.size()) {
      total += weight * moments.moment(acc);
      return;
    }
    for (const auto& [c, v] : terms[k]) {
      IndexCounts next = acc;
      for (int i = 0; i < kMaxDim; ++i) next[i] += c[i];
      walk(k + 1, next, weight * v);
    }
  };
  walk(0, IndexCounts{}, 1.0);
  return total;
}

namespace {

MomentTable moments_for(const TensorCoeffs& coeffs) {
  if (coeffs.dim < 1 || coeffs.dim > kMaxDim) throw InvalidInput("dimension must be 1, 2 or 3");
  if (!(coeffs.prior_value > 0.0)) throw InvalidInput("prior density at the MLE must be positive");
  const Eigen::MatrixXd info = coeffs.information();
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success || !info.isApprox(info.transpose(), 1e-10)) {
    throw InvalidInput("information matrix is not symmetric positive definite");
  }
  return MomentTable(llt.solve(Eigen::MatrixXd::Identity(coeffs.dim, coeffs.dim)));
}

}  // namespace

double laplace_c1(const TensorCoeffs& coeffs) {
  const MomentTable m = moments_for(coeffs);
  const double pi = coeffs.prior_value;
  const auto& h3 = coeffs.h(3);
  const auto& h4 = coeffs.h(4);
  const auto& p1 = coeffs.prior(1);
  const auto& p2 = coeffs.prior(2);
  return contract({&p2}, m) / (2.0 * pi)          //
         - contract({&h4}, m) / 24.0              //
         - contract({&h3, &p1}, m) / (6.0 * pi)   //
         + contract({&h3, &h3}, m) / 72.0;
}

double laplace_c2(const TensorCoeffs& coeffs) {
  const MomentTable m = moments_for(coeffs);
  const double pi = coeffs.prior_value;
  const auto& h3 = coeffs.h(3);
  const auto& h4 = coeffs.h(4);
  const auto& h5 = coeffs.h(5);
  const auto& h6 = coeffs.h(6);
  const auto& p1 = coeffs.prior(1);
  const auto& p2 = coeffs.prior(2);
  const auto& p3 = coeffs.prior(3);
  const auto& p4 = coeffs.prior(4);

  const double order4 = contract({&p4}, m) / 24.0;
  const double order6 = -(pi * contract({&h6}, m) + 6.0 * contract({&h5, &p1}, m) +
                          15.0 * contract({&h4, &p2}, m) + 20.0 * contract({&h3, &p3}, m)) /
                        720.0;
  const double order8 = (5.0 * pi * contract({&h4, &h4}, m) + 8.0 * pi * contract({&h5, &h3}, m) +
                         40.0 * contract({&h3, &h4, &p1}, m) + 40.0 * contract({&h3, &h3, &p2}, m)) /
                        5760.0;
  const double order10 =
      -(3.0 * pi * contract({&h4, &h3, &h3}, m) + 4.0 * contract({&h3, &h3, &h3, &p1}, m)) / 5184.0;
  const double order12 = pi * contract({&h3, &h3, &h3, &h3}, m) / 31104.0;
  return (order4 + order6 + order8 + order10 + order12) / pi;
}

TensorCoeffs make_coeffs(const LikelihoodOracle& likelihood, const PriorOracle& prior,
                         std::span<const double> mle, double* log_likelihood) {
  const LikelihoodExpansion lik = likelihood(mle);
  const PriorExpansion pr = prior(mle);
  TensorCoeffs c;
  c.dim = static_cast<int>(mle.size());
  c.mle.assign(mle.begin(), mle.end());
  c.h_derivs = lik.h_derivs;
  c.prior_value = pr.value;
  c.prior_derivs = pr.derivs;
  if (log_likelihood) *log_likelihood = lik.log_likelihood;
  return c;
}

LaplaceResult laplace_marginal(const LikelihoodOracle& likelihood, const PriorOracle& prior,
                               std::span<const double> mle, double n) {
  if (!(n > 0.0)) throw InvalidInput("sample size must be positive");
  double log_lik = 0.0;
  const TensorCoeffs coeffs = make_coeffs(likelihood, prior, mle, &log_lik);
  const Eigen::MatrixXd info = coeffs.information();
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) throw InvalidInput("information matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();

  const double p = coeffs.dim;
  LaplaceResult r;
  r.c1 = laplace_c1(coeffs);
  r.c2 = laplace_c2(coeffs);
  r.leading = log_lik + 0.5 * p * std::log(2.0 * std::numbers::pi / n) +
              std::log(coeffs.prior_value) - 0.5 * log_det;
  r.bracket1 = 1.0 + r.c1 / n;
  r.bracket2 = r.bracket1 + r.c2 / (n * n);
  r.valid = r.bracket1 > 0.0 && r.bracket2 > 0.0;
  r.with_c1 = r.bracket1 > 0.0 ? r.leading + std::log(r.bracket1) : std::nan("");
  r.with_c2 = r.bracket2 > 0.0 ? r.leading + std::log(r.bracket2) : std::nan("");
  return r;
}

}  // namespace perinull
