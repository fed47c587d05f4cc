// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/pointing.hpp"

#include "thzpoint/error.hpp"
#include "thzpoint/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace thzpoint::pointing
{
namespace
{

constexpr double pi = std::numbers::pi;

} // namespace

JitterParams make_jitter(double sigma_theta)
{
  if (!(sigma_theta > 0.0) || !std::isfinite(sigma_theta))
    throw domain_error("jitter: sigma_theta must be positive");
  return {sigma_theta};
}

PointingModel make_pointing_model(const antenna::LobeModel& lobe, JitterParams jitter, double a)
{
  make_jitter(jitter.sigma_theta);
  if (!(a >= 10.0) || !std::isfinite(a))
    throw domain_error("pointing model: a must be >= 10, got " + std::to_string(a));
  const double ratio = lobe.w_b / jitter.sigma_theta;
  return {lobe, jitter, ratio * ratio, a, 0.0};
}

PointingModel make_array_pointing_model(int n, JitterParams jitter, double a)
{
  const antenna::ArrayConfig cfg(n, 1e9); // pattern depends on N only
  auto m = make_pointing_model(antenna::fit_lobe_model(cfg, antenna::LobeSource::closed_form_approx), jitter, a);
  const double b = antenna::beamwidth_constant / jitter.sigma_theta;
  m.b1 = b * b;
  m.beta = m.b1 / (static_cast<double>(n) * n);
  return m;
}

double combine_orientation(double theta_x, double theta_y)
{
  if (!(std::abs(theta_x) < 0.5 * pi) || !(std::abs(theta_y) < 0.5 * pi))
    throw domain_error("combine_orientation: angles must lie in (-pi/2, pi/2)");
  return std::atan(std::hypot(std::tan(theta_x), std::tan(theta_y)));
}

double orientation_azimuth(double theta_x, double theta_y)
{
  return std::atan2(std::tan(theta_y), std::tan(theta_x));
}

double theta_tr_pdf(double theta, JitterParams j)
{
  if (theta <= 0.0)
    return 0.0;
  const double s2 = j.sigma_theta * j.sigma_theta;
  return theta * theta * theta / (2.0 * s2 * s2) * std::exp(-theta * theta / (2.0 * s2));
}

double theta_tr_cdf(double theta, JitterParams j)
{
  if (theta <= 0.0)
    return 0.0;
  const double t = theta * theta / (2.0 * j.sigma_theta * j.sigma_theta);
  if (t < 0.1)
  {
    // 1 - e^-t (1 + t) = sum_{k>=2} (-1)^k (k-1) t^k / k!
    double sum = 0.0;
    double power = t;
    double factorial = 1.0;
    for (int k = 2; k < 20; ++k)
    {
      power *= t;
      factorial *= k;
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * (k - 1) * power / factorial;
    }
    return sum;
  }
  return -std::expm1(-t) - t * std::exp(-t);
}

double pointing_gain_sample(double theta_tr, const antenna::LobeModel& lobe)
{
  const double t = theta_tr / lobe.w_b;
  return lobe.g0 * std::exp(-0.5 * t * t);
}

double pointing_pdf(double h_p, const PointingModel& m)
{
  const double g0 = m.lobe.g0;
  if (!(h_p > 0.0) || h_p > g0)
    return 0.0;
  const double x = h_p / g0;
  return m.beta * m.beta / g0 * std::pow(x, m.beta - 1.0) * -std::log(x);
}

double pointing_cdf(double h_p, const PointingModel& m)
{
  if (!(h_p > 0.0))
    return 0.0;
  if (h_p >= m.lobe.g0)
    return 1.0;
  const double x = h_p / m.lobe.g0;
  return std::pow(x, m.beta) * (1.0 - m.beta * std::log(x));
}

double pointing_pdf_array(double h_p, int n, double b1)
{
  const double n2 = static_cast<double>(n) * n;
  const double g0 = pi * n2;
  if (!(h_p > 0.0) || h_p > g0)
    return 0.0;
  const double exponent = b1 / n2;
  // h^(e-1) / G0^e grouped as (h/G0)^e / h so large exponents stay finite
  return b1 * b1 / (n2 * n2) * std::pow(h_p / g0, exponent) / h_p * (std::log(g0) - std::log(h_p));
}

double pointing_cdf_array(double h_p, int n, double b1)
{
  const double n2 = static_cast<double>(n) * n;
  const double g0 = pi * n2;
  if (!(h_p > 0.0))
    return 0.0;
  if (h_p >= g0)
    return 1.0;
  const double exponent = b1 / n2;
  return std::pow(h_p / g0, exponent) * (1.0 - exponent * std::log(h_p / g0));
}

double pointing_pdf_approx(double h_p, const PointingModel& m)
{
  const double g0 = m.lobe.g0;
  if (!(h_p > 0.0) || h_p > g0)
    return 0.0;
  const double x = h_p / g0;
  // x^(beta-1-1/a) - x^(beta-1) = x^(beta-1) expm1(-ln(x)/a)
  return m.a * m.beta * m.beta / g0 * std::pow(x, m.beta - 1.0) * std::expm1(-std::log(x) / m.a);
}

double approx_total_mass(const PointingModel& m)
{
  const double denominator = m.beta - 1.0 / m.a;
  if (std::abs(denominator) <= 1e-12 * m.beta)
    throw degenerate_parameter_error("tractable CDF is singular at beta = 1/a");
  return m.beta / denominator;
}

double pointing_cdf_approx(double h_p, const PointingModel& m)
{
  const double mass = approx_total_mass(m);
  if (!(h_p > 0.0))
    return 0.0;
  const double x = std::min(1.0, h_p / m.lobe.g0);
  const double inv_a = 1.0 / m.a;
  return m.a * m.beta * mass * std::pow(x, m.beta - inv_a) - m.a * m.beta * std::pow(x, m.beta);
}

double fso_pointing_fraction(double d_v, double lens_radius, double beamwidth)
{
  if (!(lens_radius > 0.0) || !(beamwidth > 0.0))
    throw domain_error("fso_pointing_fraction: lens radius and beamwidth must be positive");
  if (!(d_v >= 0.0))
    throw domain_error("fso_pointing_fraction: offset must be non-negative");

  // The y-integral over the chord is an erf; x = a sin(t) removes the square
  // root at the rim.
  const double a = lens_radius;
  const double w = beamwidth;
  const auto integrand = [=](double t) {
    const double x = a * std::sin(t);
    const double chord = a * std::cos(t);
    const double dx = (x - d_v) / w;
    return std::sqrt(2.0 / pi) / w * std::exp(-2.0 * dx * dx) * std::erf(std::sqrt(2.0) * chord / w) * chord;
  };

  std::vector<double> edges;
  constexpr int panels = 32;
  for (int i = 0; i <= panels; ++i)
    edges.push_back(-0.5 * pi + pi * i / panels);
  const auto r = quadrature::integrate_panels(integrand, edges, 1e-12, 1e-15);
  return std::clamp(r.value, 0.0, 1.0);
}

} // namespace thzpoint::pointing
