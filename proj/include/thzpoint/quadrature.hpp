// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "thzpoint/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace thzpoint::quadrature
{

inline std::string fmt_sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

struct result
{
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

namespace detail
{

struct panel
{
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;

  bool operator<(const panel& other) const { return error < other.error; }
};

// 31-point Kronrod rule with embedded 15-point Gauss rule and the QUADPACK
// error heuristic.
template <class F>
panel kronrod31(F& f, double a, double b)
{
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  using gauss = boost::math::quadrature::gauss<double, 15>;
  static const auto& x = kronrod::abscissa();
  static const auto& wk = kronrod::weights();
  static const auto& wg = gauss::weights();

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 31> values{};
  const double fc = f(center);
  values[0] = fc;
  double resk = wk[0] * fc;
  double resg = wg[0] * fc;
  double resabs = wk[0] * std::abs(fc);
  for (std::size_t i = 1; i < x.size(); ++i)
  {
    const double f1 = f(center - half * x[i]);
    const double f2 = f(center + half * x[i]);
    values[2 * i - 1] = f1;
    values[2 * i] = f2;
    resk += wk[i] * (f1 + f2);
    resabs += wk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 0)
      resg += wg[i / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = wk[0] * std::abs(fc - mean);
  for (std::size_t i = 1; i < x.size(); ++i)
    resasc += wk[i] * (std::abs(values[2 * i - 1] - mean) + std::abs(values[2 * i] - mean));

  double err = std::abs((resk - resg) * half);
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * half, err};
}

} // namespace detail

// Global adaptive Gauss-Kronrod on [a, b]: bisect the panel with the largest
// error until the total error is below max(rel_tol * |value|, abs_floor).
// Throws numeric_error with the final state when that does not happen.
template <class F>
result integrate(F&& f, double a, double b, double rel_tol, double abs_floor = 0.0, int max_intervals = 4000)
{
  if (a == b)
    return {};
  std::priority_queue<detail::panel> heap;
  auto first = detail::kronrod31(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);
  int count = 1;
  while (error > std::max(rel_tol * std::abs(value), abs_floor))
  {
    if (count >= max_intervals)
      throw numeric_error("quadrature did not converge on [" + fmt_sci(a) + ", " + fmt_sci(b) + "] after " +
                          std::to_string(count) + " panels: value=" + fmt_sci(value) +
                          " error=" + fmt_sci(error));
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw numeric_error("quadrature panel collapsed near " + fmt_sci(mid) + ": value=" + fmt_sci(value) +
                          " error=" + fmt_sci(error));
    const auto left = detail::kronrod31(f, worst.a, mid);
    const auto right = detail::kronrod31(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  if (!std::isfinite(value))
    throw numeric_error("quadrature produced a non-finite value on [" + fmt_sci(a) + ", " + fmt_sci(b) + "]");

  // Re-sum to drop the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (; !heap.empty(); heap.pop())
  {
    value += heap.top().value;
    error += heap.top().error;
  }
  return {value, error, count};
}

// integrate() over consecutive panels given by sorted edges; the tolerance
// applies to the total.
template <class F>
result integrate_panels(F&& f, std::span<const double> edges, double rel_tol, double abs_floor = 0.0)
{
  result total;
  std::vector<result> parts;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
  {
    if (!(edges[i + 1] > edges[i]))
      continue;
    parts.push_back(integrate(f, edges[i], edges[i + 1], rel_tol, abs_floor));
    total.value += parts.back().value;
    total.abs_error += parts.back().abs_error;
    total.intervals += parts.back().intervals;
  }
  return total;
}

} // namespace thzpoint::quadrature
