// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "thzpoint/antenna.hpp"

namespace thzpoint::pointing
{

constexpr double default_log_approx_constant = 80.0;

// Common standard deviation of the four zero-mean Gaussian orientation
// angles (Tx and Rx, x-z and y-z planes).
struct JitterParams
{
  double sigma_theta = 0.01;
};

JitterParams make_jitter(double sigma_theta);

// Gaussian-lobe pointing model. beta = w_B^2 / sigma^2. `a` is the constant
// of ln(x) ~ a (x^(1/a) - 1) used by the tractable approximations. b1 is
// B^2 / sigma^2 for models built from the closed-form array fit, 0 otherwise.
struct PointingModel
{
  antenna::LobeModel lobe;
  JitterParams jitter;
  double beta = 1.0;
  double a = default_log_approx_constant;
  double b1 = 0.0;
};

PointingModel make_pointing_model(const antenna::LobeModel& lobe, JitterParams jitter,
                                  double a = default_log_approx_constant);

/// Closed-form array model: G0 = pi N^2, w_B = B/N, b1 = B^2/sigma^2 and
/// beta = b1 / N^2.
PointingModel make_array_pointing_model(int n, JitterParams jitter, double a = default_log_approx_constant);

/// Boresight deviation atan(sqrt(tan^2 theta_x + tan^2 theta_y)) in [0, pi/2).
double combine_orientation(double theta_x, double theta_y);

/// Azimuth of the deviated boresight, atan2(tan theta_y, tan theta_x).
double orientation_azimuth(double theta_x, double theta_y);

// Density and CDF of theta_tr = sqrt(theta_t^2 + theta_r^2).
double theta_tr_pdf(double theta, JitterParams j);
double theta_tr_cdf(double theta, JitterParams j);

// h_p = G0 exp(-theta_tr^2 / (2 w_B^2))
double pointing_gain_sample(double theta_tr, const antenna::LobeModel& lobe);

/// Exact pointing-error density on (0, G0]:
///   (beta^2 / G0^beta) h^(beta-1) (ln G0 - ln h).
/// Zero outside the support.
double pointing_pdf(double h_p, const PointingModel& m);

/// (h/G0)^beta (1 - beta ln(h/G0)); 0 below the support, 1 above it.
double pointing_cdf(double h_p, const PointingModel& m);

// The same two laws written in N and b1 with G0 = pi N^2.
double pointing_pdf_array(double h_p, int n, double b1);
double pointing_cdf_array(double h_p, int n, double b1);

/// Tractable density with ln(h/G0) replaced by a((h/G0)^(1/a) - 1). Its total
/// mass is beta / (beta - 1/a), slightly above one.
double pointing_pdf_approx(double h_p, const PointingModel& m);

/// Integral of pointing_pdf_approx. Throws degenerate_parameter_error when
/// beta = 1/a.
double pointing_cdf_approx(double h_p, const PointingModel& m);

/// Total mass beta / (beta - 1/a) of the tractable density.
double approx_total_mass(const PointingModel& m);

/// Fraction of a Gaussian beam of radius w_z, centred d_v off-axis, that
/// falls on a circular lens of radius lens_radius (the lens-receiver
/// pointing loss used in optical links).
double fso_pointing_fraction(double d_v, double lens_radius, double beamwidth);

} // namespace thzpoint::pointing
