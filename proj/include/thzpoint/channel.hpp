// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "thzpoint/pointing.hpp"

#include <optional>
#include <string_view>

namespace thzpoint::channel
{

// alpha-mu small-scale fading with alpha-root mean value h_hat.
struct AlphaMuParams
{
  double alpha = 2.0;
  double mu = 1.0;
  double h_hat = 1.0;
};

AlphaMuParams make_alpha_mu(double alpha, double mu, double h_hat);

struct LinkBudget
{
  double distance = 100.0;          // m
  double carrier_frequency = 275e9; // Hz
  double absorption_coeff = 0.0;    // 1/m
  double tx_power = 1.0;            // W
  double noise_power = 1e-12;       // W
};

LinkBudget make_link_budget(double distance, double carrier_frequency, double absorption_coeff, double tx_power,
                            double noise_power);

/// (lambda / (4 pi Z))^2 exp(-K Z / 2).
double path_loss(const LinkBudget& link);

// Per-k exponents and Whittaker indices of the closed-form CDF.
struct CdfTermConstants
{
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double b5 = 0.0;
  double b6 = 0.0;
  double b7 = 0.0;
};

struct ChannelModel
{
  AlphaMuParams fading;
  pointing::PointingModel pointing;
  std::optional<LinkBudget> link;
  double h_l = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double log_c1 = 0.0; // c1 and c5 under- or overflow for large alpha mu
  double log_c5 = 0.0;
  double b1 = 0.0;
};

ChannelModel make_channel_model(const AlphaMuParams& fading, const pointing::PointingModel& pointing,
                                const LinkBudget& link);

/// Model with a given path loss and no link budget (outage unavailable).
ChannelModel make_channel_model(const AlphaMuParams& fading, const pointing::PointingModel& pointing, double h_l);

CdfTermConstants cdf_term_constants(const ChannelModel& cm, int k);

double alpha_mu_pdf(double h_a, const AlphaMuParams& p);
double alpha_mu_cdf(double h_a, const AlphaMuParams& p);

enum class EvalPath
{
  closed_form,
  numeric
};

std::string_view to_string(EvalPath path);

struct Evaluation
{
  double value = 0.0;
  EvalPath path = EvalPath::closed_form;
};

/// Closed-form density of h = h_L h_p h_a from two Whittaker terms. The
/// pointing law is the tractable one, renormalized to unit mass. Falls back
/// to quadrature (path = numeric) when the two terms agree to within
/// 1e6 machine epsilon; throws numeric_error if their difference is negative.
Evaluation channel_pdf_eval(double h, const ChannelModel& cm);
double channel_pdf(double h, const ChannelModel& cm);

/// Closed-form CDF (finite sum over k < mu, integer mu). Non-integer mu and
/// lower-tail values below the round-off level of 1 - S are computed by
/// quadrature and reported with path = numeric.
Evaluation channel_cdf_eval(double h, const ChannelModel& cm);
double channel_cdf(double h, const ChannelModel& cm);

enum class PointingLaw
{
  exact,      // (beta^2/G0) x^(beta-1) (-ln x)
  tractable   // ln x -> a (x^(1/a) - 1), normalized to unit mass
};

/// Density of h by direct quadrature over the pointing gain.
double convolution_pdf(double h, const ChannelModel& cm, PointingLaw law = PointingLaw::exact);

/// CDF of h by direct quadrature over the pointing gain.
double convolution_cdf(double h, const ChannelModel& cm, PointingLaw law = PointingLaw::exact);

/// Probability that P_t h^2 / N_0 < gamma_th (linear threshold). Requires a
/// link budget in the model.
Evaluation outage_probability(double gamma_th, const ChannelModel& cm);

} // namespace thzpoint::channel
