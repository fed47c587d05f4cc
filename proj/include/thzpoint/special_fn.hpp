// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace thzpoint::special_fn
{

// Index pair and argument of W_{kappa,lambda}(z).
struct WhittakerArgs
{
  double kappa = 0.0;
  double lambda = 0.5;
  double z = 1.0;
};

// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^(-t) dt for any
/// finite real order s and x > 0. Throws numeric_error on overflow.
double upper_incomplete_gamma(double s, double x);

/// ln Gamma(s, x). Never overflows for finite inputs; use this when the
/// result is combined with other large or small factors.
double log_upper_incomplete_gamma(double s, double x);

// Regularized P(s, x) = gamma(s, x) / Gamma(s), s > 0, x >= 0.
double regularized_lower_gamma(double s, double x);

// Regularized Q(s, x) = Gamma(s, x) / Gamma(s), s > 0, x >= 0.
double regularized_upper_gamma(double s, double x);

/// Whittaker W for the family lambda = +/-(kappa + 1/2), evaluated through
///   W_{kappa, kappa+1/2}(z) = z^(-kappa) e^(z/2) Gamma(1 + 2 kappa, z).
/// Other index pairs raise unsupported_error.
double whittaker_w(const WhittakerArgs& args);
double log_whittaker_w(const WhittakerArgs& args);

/// int_u^inf x^(-nu) e^(-x) dx by adaptive quadrature. Independent of the
/// incomplete-gamma code path; used to check it.
double tail_integral(double nu, double u);

} // namespace thzpoint::special_fn
