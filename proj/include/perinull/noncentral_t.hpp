#pragma once

namespace perinull {

// Natural log of the noncentral Student-t density with nu degrees of freedom
// and noncentrality ncp, evaluated at x.
//
// Uses the mixture representation T = (Z + ncp) / sqrt(V / nu), V ~ chi2(nu).
// After the substitution s = sqrt(V / nu) = exp(u) the density becomes
//
//   C(nu) * exp(-ncp^2 nu / (2 A)) * Int exp((nu + 1) u - (sqrt(A) e^u - b)^2 / 2) du
//
// with A = nu + x^2 and b = ncp x / sqrt(A). The integrand is unimodal in u
// with a closed-form mode, so it is normalized at its peak and integrated
// over the window where it exceeds exp(-80). The Gaussian factor in ncp is
// carried analytically, which keeps the result finite far beyond the range
// where the density itself underflows.
//
// Throws InvalidInput for nu <= 0 or non-finite arguments.
double noncentral_t_logpdf(double x, double nu, double ncp);

// Central Student-t log density; closed form.
double student_t_logpdf(double x, double nu);

}  // namespace perinull
