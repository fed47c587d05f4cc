// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/antenna.hpp"

#include "thzpoint/error.hpp"
#include "thzpoint/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace thzpoint::antenna
{
namespace
{

constexpr double pi = std::numbers::pi;

// sin(N psi/2) / (N sin(psi/2)); the removable singularity at psi/2 = m pi
// is replaced by its Taylor expansion (sign dropped, the caller squares).
double array_ratio(int n, double psi)
{
  const double half = 0.5 * psi;
  const double delta = half - pi * std::round(half / pi);
  if (std::abs(delta) < 1e-8)
    return 1.0 - (static_cast<double>(n) * n - 1.0) * delta * delta / 6.0;
  return std::sin(n * half) / (n * std::sin(half));
}

// G' written in direction cosines; k d = pi for half-wavelength spacing.
double gain_from_cosines(int n, double u, double v)
{
  const double r = array_ratio(n, pi * u) * array_ratio(n, pi * v);
  return r * r;
}

std::vector<double> uniform_edges(double a, double b, int panels)
{
  std::vector<double> edges(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i)
    edges[i] = a + (b - a) * i / panels;
  edges.back() = b;
  return edges;
}

} // namespace

ArrayConfig::ArrayConfig(int n_elements_per_side, double carrier_frequency_hz)
    : n_(n_elements_per_side), carrier_frequency_(carrier_frequency_hz)
{
  if (n_ < 1)
    throw domain_error("array: N must be >= 1, got " + std::to_string(n_));
  if (!(carrier_frequency_ > 0.0) || !std::isfinite(carrier_frequency_))
    throw domain_error("array: carrier frequency must be positive");
}

double ArrayConfig::wavenumber() const
{
  return 2.0 * pi / wavelength();
}

std::string_view to_string(LobeSource source)
{
  return source == LobeSource::exact_fit ? "exact-fit" : "closed-form-approx";
}

LobeSource lobe_source_from_string(std::string_view name)
{
  if (name == "exact-fit")
    return LobeSource::exact_fit;
  if (name == "closed-form-approx")
    return LobeSource::closed_form_approx;
  throw domain_error("unknown lobe model '" + std::string(name) + "' (expected exact-fit or closed-form-approx)");
}

LobeModel make_lobe_model(double g0, double w_b, LobeSource source)
{
  if (!(g0 > 0.0) || !std::isfinite(g0))
    throw domain_error("lobe model: g0 must be positive");
  if (!(w_b > 0.0) || !(w_b < 0.5 * pi))
    throw domain_error("lobe model: w_b must lie in (0, pi/2)");
  return {g0, w_b, source};
}

double array_factor_gain(const ArrayConfig& cfg, double theta, double phi)
{
  const double s = std::sin(theta);
  return gain_from_cosines(cfg.n(), s * std::cos(phi), s * std::sin(phi));
}

double normalization_g0(const ArrayConfig& cfg)
{
  const int n = cfg.n();
  if (n == 1)
    return 2.0;

  // Inner integral over phi in [0, pi/2]; roughly one panel per lobe.
  const auto inner = [n](double theta) {
    const double s = std::sin(theta);
    const int panels = std::max(2, static_cast<int>(std::ceil(n * s)));
    const auto edges = uniform_edges(0.0, 0.5 * pi, panels);
    const auto f = [n, s](double phi) { return gain_from_cosines(n, s * std::cos(phi), s * std::sin(phi)); };
    return s * quadrature::integrate_panels(f, edges, 1e-11, 1e-16).value;
  };

  const auto edges = uniform_edges(0.0, 0.5 * pi, 2 * n);
  const auto octant = quadrature::integrate_panels(inner, edges, 1e-10, 1e-15);
  if (!(octant.value > 0.0))
    throw numeric_error("normalization_g0: non-positive pattern integral for N=" + std::to_string(n));
  // Radiation into the front half-space only: 4 pi / (4 * octant).
  return pi / octant.value;
}

double solve_beamwidth(const ArrayConfig& cfg)
{
  const int n = cfg.n();
  if (n < 2)
    throw domain_error("solve_beamwidth: N=1 has no 1/e beamwidth");

  const double first_null = std::asin(std::min(1.0, 2.0 / n));
  const double level = std::exp(-1.0);
  const auto residual = [&](double theta) { return array_factor_gain(cfg, theta, 0.0) - level; };

  std::uintmax_t iterations = 200;
  const auto done = [](double a, double b) { return std::abs(b - a) <= 1e-14; };
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, first_null, done, iterations);
  if (iterations >= 200)
    throw numeric_error("solve_beamwidth: root search did not converge for N=" + std::to_string(n));
  return 0.5 * (lo + hi);
}

LobeModel fit_lobe_model(const ArrayConfig& cfg, LobeSource mode)
{
  if (cfg.n() < 2)
    throw domain_error("fit_lobe_model: N must be >= 2");
  if (mode == LobeSource::closed_form_approx)
  {
    const double n = cfg.n();
    return make_lobe_model(pi * n * n, beamwidth_constant / n, mode);
  }
  return make_lobe_model(normalization_g0(cfg), solve_beamwidth(cfg), mode);
}

double gaussian_gain(const LobeModel& model, double theta)
{
  const double t = theta / model.w_b;
  return model.g0 * std::exp(-t * t);
}

} // namespace thzpoint::antenna
