// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/channel.hpp"

#include "thzpoint/error.hpp"
#include "thzpoint/quadrature.hpp"
#include "thzpoint/special_fn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace thzpoint::channel
{
namespace
{

constexpr double pi = std::numbers::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double cancellation_limit = 1e6 * eps;
constexpr double log_window = 60.0;
constexpr double lower_tail_handoff = 1e-6;

bool is_integer(double v)
{
  return v == std::floor(v);
}

// Integral of exp(g(t)) over t > 0 for concave g with g(0+) = -inf. Returns
// the log of the integral: peak located on a log grid and refined by golden
// section, range cut where g drops log_window below the peak.
template <class G>
double log_integral_concave(G&& g, double rel_tol)
{
  constexpr double t_first = 1e-12;
  constexpr double ratio = 1.25;
  std::vector<double> ts;
  std::vector<double> gs;
  for (double t = t_first; t < 1e5; t *= ratio)
  {
    const double v = g(t);
    ts.push_back(t);
    gs.push_back(std::isnan(v) ? -std::numeric_limits<double>::infinity() : v);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < gs.size(); ++i)
    if (gs[i] > gs[best])
      best = i;
  if (!std::isfinite(gs[best]))
    throw numeric_error("convolution: integrand vanishes on the whole range");
  if (best + 1 == gs.size())
    throw numeric_error("convolution: integrand peak beyond the search range");

  // Golden section on the bracket around the best grid point.
  double lo = best == 0 ? 0.0 : ts[best - 1];
  double hi = ts[best + 1];
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double g1 = g(x1);
  double g2 = g(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i)
  {
    if (g1 < g2)
    {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + golden * (hi - lo);
      g2 = g(x2);
    }
    else
    {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - golden * (hi - lo);
      g1 = g(x1);
    }
  }
  double mode = 0.5 * (lo + hi);
  double peak = g(mode);
  if (gs[best] > peak)
  {
    mode = ts[best];
    peak = gs[best];
  }
  const double floor_level = peak - log_window;

  const auto crossing = [&](double inside, double outside) {
    for (int i = 0; i < 200; ++i)
    {
      const double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside)
        break;
      (g(mid) > floor_level ? inside : outside) = mid;
    }
    return outside;
  };

  double left = 0.0;
  if (g(t_first) <= floor_level)
    left = crossing(mode, 0.0);
  double right = std::max(2.0 * mode, mode + 1.0);
  while (g(right) > floor_level)
  {
    right = mode + 2.0 * (right - mode);
    if (right > 1e7)
      throw numeric_error("convolution: integrand tail does not decay");
  }
  right = crossing(mode, right);

  const std::array<double, 9> edges{left,
                                    left + 0.5 * (mode - left),
                                    left + 0.9 * (mode - left),
                                    mode,
                                    mode + 0.05 * (right - mode),
                                    mode + 0.15 * (right - mode),
                                    mode + 0.35 * (right - mode),
                                    mode + 0.65 * (right - mode),
                                    right};
  const auto scaled = [&](double t) { return std::exp(g(t) - peak); };
  const auto r = quadrature::integrate_panels(scaled, edges, rel_tol, 1e-300);
  if (!(r.value > 0.0))
    throw numeric_error("convolution: non-positive integral");
  return peak + std::log(r.value);
}

// log w(t) with t = -ln(h_p / G0); w replaces -ln x in the pointing density.
double log_weight(double t, const pointing::PointingModel& m, PointingLaw law)
{
  if (law == PointingLaw::exact)
    return std::log(t);
  const double r = t / m.a;
  return std::log(m.a) + (r < 1.0 ? std::log(std::expm1(r)) : r + std::log1p(-std::exp(-r)));
}

double log_law_mass(const pointing::PointingModel& m, PointingLaw law)
{
  return law == PointingLaw::exact ? 0.0 : std::log(pointing::approx_total_mass(m));
}

constexpr double log_underflow = -745.0;

// log of e^{l1} - e^{l2} for l1 > l2, or nullopt when the difference is
// within 1e6 eps of the log-domain round-off. Throws when l1 < l2 beyond it.
std::optional<double> log_difference(double l1, double l2, const char* what)
{
  const double d = std::expm1(l1 - l2);
  if (std::abs(d) < cancellation_limit * std::max(1.0, std::abs(l2)))
    return std::nullopt;
  if (d < 0.0)
    throw numeric_error(std::string(what) + ": negative value from the closed form (relative difference " +
                        quadrature::fmt_sci(d) + ")");
  return l2 + std::log(d);
}

void require_positive(double v, const char* name)
{
  if (!(v > 0.0) || !std::isfinite(v))
    throw domain_error(std::string(name) + " must be positive and finite");
}

} // namespace

AlphaMuParams make_alpha_mu(double alpha, double mu, double h_hat)
{
  require_positive(alpha, "fading.alpha");
  require_positive(mu, "fading.mu");
  require_positive(h_hat, "fading.h_hat");
  return {alpha, mu, h_hat};
}

LinkBudget make_link_budget(double distance, double carrier_frequency, double absorption_coeff, double tx_power,
                            double noise_power)
{
  require_positive(distance, "link.distance");
  require_positive(carrier_frequency, "link.carrier_frequency");
  if (!(absorption_coeff >= 0.0) || !std::isfinite(absorption_coeff))
    throw domain_error("link.absorption_coeff must be non-negative");
  require_positive(tx_power, "link.tx_power");
  require_positive(noise_power, "link.noise_power");
  return {distance, carrier_frequency, absorption_coeff, tx_power, noise_power};
}

double path_loss(const LinkBudget& link)
{
  const double lambda = antenna::speed_of_light / link.carrier_frequency;
  const double free_space = lambda / (4.0 * pi * link.distance);
  return free_space * free_space * std::exp(-0.5 * link.absorption_coeff * link.distance);
}

ChannelModel make_channel_model(const AlphaMuParams& fading, const pointing::PointingModel& pointing, double h_l)
{
  make_alpha_mu(fading.alpha, fading.mu, fading.h_hat);
  require_positive(h_l, "path loss");
  const double alpha = fading.alpha;
  const double mu = fading.mu;
  const double beta = pointing.beta;

  ChannelModel cm;
  cm.fading = fading;
  cm.pointing = pointing;
  cm.h_l = h_l;
  cm.log_c1 = std::log(alpha) + mu * std::log(mu) - alpha * mu * std::log(fading.h_hat) - special_fn::ln_gamma(mu);
  cm.c1 = std::exp(cm.log_c1);
  cm.c2 = mu / std::pow(fading.h_hat, alpha);
  cm.c3 = 0.5 * (beta / alpha - mu + 1.0);
  cm.c4 = cm.c3 + mu - 1.0 - 1.0 / alpha;
  cm.log_c5 = std::log(pointing.a * beta * beta / alpha) + cm.log_c1 + (1.0 / alpha - mu) * std::log(cm.c2);
  cm.c5 = std::exp(cm.log_c5);
  cm.b1 = std::pow(mu, 1.0 / alpha) / (pointing.lobe.g0 * fading.h_hat * h_l);
  if (!(cm.c2 > 0.0) || !(cm.b1 > 0.0) || !std::isfinite(cm.b1))
    throw degenerate_parameter_error("channel constants C2 and B1 must be positive and finite");
  if (std::abs(cm.c4 - (cm.c3 + mu - 1.0 - 1.0 / alpha)) != 0.0)
    throw numeric_error("channel constants: C4 identity violated");
  return cm;
}

ChannelModel make_channel_model(const AlphaMuParams& fading, const pointing::PointingModel& pointing,
                                const LinkBudget& link)
{
  auto cm = make_channel_model(fading, pointing, path_loss(link));
  cm.link = link;
  return cm;
}

CdfTermConstants cdf_term_constants(const ChannelModel& cm, int k)
{
  const double alpha = cm.fading.alpha;
  const double beta = cm.pointing.beta;
  const double a = cm.pointing.a;
  CdfTermConstants c;
  c.b2 = alpha * (k - 1) / 2.0 + beta / 2.0 - 1.0 / (2.0 * a) - 1.0;
  c.b3 = (k - 1) / 2.0 - beta / (2.0 * alpha) + 1.0 / (2.0 * a * alpha);
  c.b4 = c.b3 + 0.5;
  c.b5 = alpha * (k - 1) / 2.0 + beta / 2.0 - 1.0;
  c.b6 = (k - 1) / 2.0 - beta / (2.0 * alpha);
  c.b7 = c.b6 + 0.5;
  return c;
}

double alpha_mu_pdf(double h_a, const AlphaMuParams& p)
{
  if (!(h_a > 0.0))
    return 0.0;
  const double r = std::pow(h_a / p.h_hat, p.alpha);
  const double log_c1 =
      std::log(p.alpha) + p.mu * std::log(p.mu) - p.alpha * p.mu * std::log(p.h_hat) - special_fn::ln_gamma(p.mu);
  return std::exp(log_c1 + (p.alpha * p.mu - 1.0) * std::log(h_a) - p.mu * r);
}

double alpha_mu_cdf(double h_a, const AlphaMuParams& p)
{
  if (!(h_a > 0.0))
    return 0.0;
  return special_fn::regularized_lower_gamma(p.mu, p.mu * std::pow(h_a / p.h_hat, p.alpha));
}

std::string_view to_string(EvalPath path)
{
  return path == EvalPath::closed_form ? "closed-form" : "numeric";
}

double convolution_pdf(double h, const ChannelModel& cm, PointingLaw law)
{
  if (!(h > 0.0))
    return 0.0;
  const auto& f = cm.fading;
  const auto& m = cm.pointing;
  const double scale = m.lobe.g0 * cm.h_l;
  const double log_s = std::log(h / scale);
  const double log_h_hat = std::log(f.h_hat);

  // h_p = G0 e^{-t}: f_h = (beta^2 / (G0 h_L)) int e^{-(beta-1)t} w(t) f_a(s e^t) dt
  const auto g = [&](double t) {
    const double log_y = log_s + t;
    return -(m.beta - 1.0) * t + log_weight(t, m, law) + cm.log_c1 + (f.alpha * f.mu - 1.0) * log_y -
           f.mu * std::exp(f.alpha * (log_y - log_h_hat));
  };
  const double log_integral = log_integral_concave(g, 1e-12);
  return std::exp(2.0 * std::log(m.beta) - std::log(scale) + log_integral - log_law_mass(m, law));
}

double convolution_cdf(double h, const ChannelModel& cm, PointingLaw law)
{
  if (!(h > 0.0))
    return 0.0;
  const auto& f = cm.fading;
  const auto& m = cm.pointing;
  const double log_s = std::log(h / (m.lobe.g0 * cm.h_l));
  const double log_h_hat = std::log(f.h_hat);

  // F_h = int beta^2 e^{-beta t} w(t) P(mu, mu (s e^t / h_hat)^alpha) dt
  const auto g = [&](double t) {
    const double z = f.mu * std::exp(f.alpha * (log_s + t - log_h_hat));
    const double p = special_fn::regularized_lower_gamma(f.mu, z);
    return -m.beta * t + log_weight(t, m, law) + std::log(p);
  };
  const double log_integral = log_integral_concave(g, 1e-12);
  return std::min(1.0, std::exp(2.0 * std::log(m.beta) + log_integral - log_law_mass(m, law)));
}

Evaluation channel_pdf_eval(double h, const ChannelModel& cm)
{
  if (!(h > 0.0))
    return {0.0, EvalPath::closed_form};
  const auto& m = cm.pointing;
  const double alpha = cm.fading.alpha;
  const double scale = m.lobe.g0 * cm.h_l;
  const double u = cm.c2 * std::pow(h / scale, alpha);
  const double log_u = std::log(u);
  const double shift = 1.0 / (2.0 * alpha * m.a);

  const double l1 = (cm.c4 - shift) * log_u - 0.5 * u +
                    special_fn::log_whittaker_w({shift - cm.c3, 0.5 + shift - cm.c3, u});
  const double l2 = cm.c4 * log_u - 0.5 * u + special_fn::log_whittaker_w({-cm.c3, 0.5 - cm.c3, u});
  const double log_mass = std::log(pointing::approx_total_mass(m));
  const double log_front = cm.log_c5 - std::log(scale) - log_mass;
  if (log_front + std::max(l1, l2) < log_underflow)
    return {0.0, EvalPath::closed_form};
  const auto bracket = log_difference(l1, l2, "channel_pdf");
  if (!bracket)
    return {convolution_pdf(h, cm, PointingLaw::tractable), EvalPath::numeric};
  return {std::exp(log_front + *bracket), EvalPath::closed_form};
}

double channel_pdf(double h, const ChannelModel& cm)
{
  return channel_pdf_eval(h, cm).value;
}

Evaluation channel_cdf_eval(double h, const ChannelModel& cm)
{
  if (!(h > 0.0))
    return {0.0, EvalPath::closed_form};
  const auto numeric = [&] { return Evaluation{convolution_cdf(h, cm, PointingLaw::tractable), EvalPath::numeric}; };
  const double mu = cm.fading.mu;
  if (!is_integer(mu))
    return numeric();

  const auto& m = cm.pointing;
  const double alpha = cm.fading.alpha;
  const double log_bh = std::log(cm.b1 * h);
  const double big_u = std::exp(alpha * log_bh);
  const double log_prefactor = log_bh - std::log(alpha) + std::log(m.a * m.beta * m.beta);

  double tail = 0.0;
  for (int k = 0; k < static_cast<int>(mu); ++k)
  {
    const auto c = cdf_term_constants(cm, k);
    const double l1 = c.b2 * log_bh - 0.5 * big_u + special_fn::log_whittaker_w({c.b3, c.b4, big_u});
    const double l2 = c.b5 * log_bh - 0.5 * big_u + special_fn::log_whittaker_w({c.b6, c.b7, big_u});
    const double log_front = log_prefactor - special_fn::ln_gamma(k + 1.0);
    if (log_front + std::max(l1, l2) < log_underflow)
      continue;
    const auto bracket = log_difference(l1, l2, "channel_cdf");
    if (!bracket)
      return numeric();
    tail += std::exp(log_front + *bracket);
  }
  const double value = 1.0 - tail / pointing::approx_total_mass(m);
  // 1 - S keeps ~1e-12 absolute accuracy; hand the far lower tail to quadrature.
  if (value < lower_tail_handoff)
    return numeric();
  return {std::min(1.0, value), EvalPath::closed_form};
}

double channel_cdf(double h, const ChannelModel& cm)
{
  return channel_cdf_eval(h, cm).value;
}

Evaluation outage_probability(double gamma_th, const ChannelModel& cm)
{
  if (!(gamma_th > 0.0))
    throw domain_error("outage: gamma_th must be positive");
  if (!cm.link)
    throw domain_error("outage: the channel model has no link budget");
  return channel_cdf_eval(std::sqrt(cm.link->noise_power * gamma_th / cm.link->tx_power), cm);
}

} // namespace thzpoint::channel
