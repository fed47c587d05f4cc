// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/special_fn.hpp"

#include "thzpoint/error.hpp"
#include "thzpoint/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace thzpoint::special_fn
{
namespace
{

constexpr double euler_gamma = 0.57721566490153286061;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double tiny = 1e-300;
constexpr int max_iterations = 100000;

// Crossover between the series/Temme branches and the continued fraction.
constexpr double small_x = 1.5;

const std::array<double, 64>& zeta_table()
{
  static const std::array<double, 64> table = [] {
    std::array<double, 64> z{};
    for (int k = 2; k < 64; ++k)
      z[k] = std::riemann_zeta(static_cast<double>(k));
    return z;
  }();
  return table;
}

// ln Gamma(1 + s) / s for |s| <= 1/2 from the zeta series of ln Gamma(1 + s).
double ln_gamma1p_over_s(double s)
{
  const auto& zeta = zeta_table();
  double sum = 0.0;
  double power = s;
  for (int k = 2; k < 64; ++k)
  {
    const double term = ((k % 2 == 0) ? 1.0 : -1.0) * zeta[k] * power / k;
    sum += term;
    if (std::abs(term) < 1e-18)
      break;
    power *= s;
  }
  return -euler_gamma + sum;
}

double expm1_over_x(double x)
{
  return x == 0.0 ? 1.0 : std::expm1(x) / x;
}

// Gamma(s, x) for s in [-1/2, 1/2], 0 < x < small_x:
//   (Gamma(1+s) - x^s)/s - x^s sum_{n>=1} (-x)^n / (n! (s+n))
// with both quotients written so that s = 0 gives E1(x).
double small_order_upper_gamma(double s, double x)
{
  const double log_x = std::log(x);
  const double r = ln_gamma1p_over_s(s);
  const double gamma_term = r * expm1_over_x(s * r);
  const double power_term = log_x * expm1_over_x(s * log_x);

  double sum = 0.0;
  double factor = 1.0;
  for (int n = 1; n < max_iterations; ++n)
  {
    factor *= -x / n;
    const double term = factor / (s + n);
    sum += term;
    if (std::abs(term) <= eps * std::abs(sum))
      break;
  }
  return (gamma_term - power_term) - std::exp(s * log_x) * sum;
}

// ln of the lower regularized series sum_{n>=0} x^n / ((s+1)...(s+n)), s > 0.
double log_lower_series(double s, double x)
{
  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n < max_iterations; ++n)
  {
    term *= x / (s + n);
    sum += term;
    if (term <= eps * sum)
      return std::log(sum);
  }
  throw numeric_error("incomplete gamma series did not converge for s=" + std::to_string(s) +
                      " x=" + std::to_string(x));
}

double log_regularized_lower_series(double s, double x)
{
  return s * std::log(x) - x - ln_gamma(s + 1.0) + log_lower_series(s, x);
}

// ln Gamma(s, x) by the modified Lentz continued fraction; any real s, x >= 1.
double log_upper_continued_fraction(double s, double x)
{
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iterations; ++i)
  {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) <= eps)
      return s * std::log(x) - x + std::log(h);
  }
  throw numeric_error("incomplete gamma continued fraction did not converge for s=" + std::to_string(s) +
                      " x=" + std::to_string(x));
}

void check_argument(double s, double x)
{
  if (!std::isfinite(s))
    throw domain_error("incomplete gamma: order must be finite");
  if (!(x > 0.0) || !std::isfinite(x))
    throw domain_error("incomplete gamma: argument must be positive and finite, got " + std::to_string(x));
}

bool in_whittaker_family(const WhittakerArgs& a)
{
  const double tol = 1e-12 * std::max(1.0, std::abs(a.kappa));
  const double target = a.kappa + 0.5;
  return std::abs(a.lambda - target) <= tol || std::abs(a.lambda + target) <= tol;
}

} // namespace

double ln_gamma(double x)
{
  if (!(x > 0.0) || !std::isfinite(x))
    throw domain_error("ln_gamma: argument must be positive and finite");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_upper_incomplete_gamma(double s, double x)
{
  check_argument(s, x);

  if (x >= small_x && x >= s + 1.0)
    return log_upper_continued_fraction(s, x);

  if (s >= 0.5)
  {
    // x < max(s + 1, small_x): Q(s, x) stays well away from zero here.
    const double p = std::exp(log_regularized_lower_series(s, x));
    return ln_gamma(s) + std::log1p(-p);
  }

  if (s >= -0.5)
    return std::log(small_order_upper_gamma(s, x));

  // Downward recurrence Gamma(t, x) = (Gamma(t+1, x) - x^t e^-x) / t carried
  // on R(t) = Gamma(t, x) / (x^t e^-x), i.e. R(t) = (x R(t+1) - 1) / t.
  const int steps = static_cast<int>(std::ceil(-0.5 - s));
  const double seed_order = s + steps;
  const double log_x = std::log(x);
  double ratio = small_order_upper_gamma(seed_order, x) * std::exp(x - seed_order * log_x);
  double t = seed_order;
  for (int i = 0; i < steps; ++i)
  {
    t -= 1.0;
    ratio = (x * ratio - 1.0) / t;
  }
  if (!(ratio > 0.0))
    throw numeric_error("incomplete gamma recurrence lost positivity for s=" + std::to_string(s) +
                        " x=" + std::to_string(x));
  return s * log_x - x + std::log(ratio);
}

double upper_incomplete_gamma(double s, double x)
{
  const double log_value = log_upper_incomplete_gamma(s, x);
  if (log_value > std::log(std::numeric_limits<double>::max()))
    throw numeric_error("upper_incomplete_gamma overflows for s=" + std::to_string(s) + " x=" + std::to_string(x));
  return std::exp(log_value);
}

double regularized_lower_gamma(double s, double x)
{
  if (!(s > 0.0) || !std::isfinite(s))
    throw domain_error("regularized_lower_gamma: order must be positive");
  if (x < 0.0 || std::isnan(x))
    throw domain_error("regularized_lower_gamma: argument must be non-negative");
  if (x == 0.0)
    return 0.0;
  if (std::isinf(x))
    return 1.0;
  if (x < s + 1.0)
    return std::exp(log_regularized_lower_series(s, x));
  return -std::expm1(log_upper_incomplete_gamma(s, x) - ln_gamma(s));
}

double regularized_upper_gamma(double s, double x)
{
  if (!(s > 0.0) || !std::isfinite(s))
    throw domain_error("regularized_upper_gamma: order must be positive");
  if (x < 0.0 || std::isnan(x))
    throw domain_error("regularized_upper_gamma: argument must be non-negative");
  if (x == 0.0)
    return 1.0;
  if (std::isinf(x))
    return 0.0;
  if (x < s + 1.0 && s >= 0.5)
    return -std::expm1(log_regularized_lower_series(s, x));
  return std::exp(log_upper_incomplete_gamma(s, x) - ln_gamma(s));
}

double log_whittaker_w(const WhittakerArgs& args)
{
  if (!std::isfinite(args.kappa) || !std::isfinite(args.lambda))
    throw domain_error("whittaker_w: indices must be finite");
  if (!(args.z > 0.0) || !std::isfinite(args.z))
    throw domain_error("whittaker_w: argument must be positive and finite");
  if (!in_whittaker_family(args))
    throw unsupported_error("whittaker_w: only lambda = +/-(kappa + 1/2) is supported, got kappa=" +
                            std::to_string(args.kappa) + " lambda=" + std::to_string(args.lambda));
  return -args.kappa * std::log(args.z) + 0.5 * args.z +
         log_upper_incomplete_gamma(1.0 + 2.0 * args.kappa, args.z);
}

double whittaker_w(const WhittakerArgs& args)
{
  const double log_value = log_whittaker_w(args);
  if (log_value > std::log(std::numeric_limits<double>::max()))
    throw numeric_error("whittaker_w overflows");
  return std::exp(log_value);
}

double tail_integral(double nu, double u)
{
  if (!std::isfinite(nu))
    throw domain_error("tail_integral: nu must be finite");
  if (!(u > 0.0) || !std::isfinite(u))
    throw domain_error("tail_integral: lower limit must be positive and finite");

  // x = u e^y maps [u, inf) to [0, inf) and removes the endpoint spike for
  // large nu; the integrand becomes exp((1 - nu)(ln u + y) - u e^y).
  const double log_u = std::log(u);
  const auto log_integrand = [&](double y) { return (1.0 - nu) * (log_u + y) - u * std::exp(y); };

  double peak = 0.0;
  if (1.0 - nu > u)
    peak = std::log((1.0 - nu) / u);
  const double log_max = log_integrand(peak);

  std::vector<double> edges;
  for (double y = 0.0; y < peak; y += 1.0)
    edges.push_back(y);
  edges.push_back(peak);
  double y = peak;
  while (log_integrand(y) > log_max - 60.0)
  {
    y += 1.0;
    edges.push_back(y);
  }

  const auto scaled = [&](double t) { return std::exp(log_integrand(t) - log_max); };
  const auto r = quadrature::integrate_panels(scaled, edges, 1e-13, 1e-17);
  return r.value * std::exp(log_max);
}

} // namespace thzpoint::special_fn
