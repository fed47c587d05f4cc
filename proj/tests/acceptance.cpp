// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.
#include "thzpoint/cli.hpp"
#include "thzpoint/quadrature.hpp"
#include "thzpoint/special_fn.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace thzpoint;

namespace
{

struct Outcome
{
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body)
{
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try
  {
    o = body();
  }
  catch (const std::exception& e)
  {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string timing = fmt::format("{:.1f} s", seconds);
  if (time_limit_s > 0.0)
  {
    timing += fmt::format(" of {:.0f} s", time_limit_s);
    if (seconds > time_limit_s)
    {
      o.pass = false;
      timing += " EXCEEDED";
    }
  }
  if (!o.pass)
    ++failures;
  fmt::print("{} {}. {}: {} [{}]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, timing);
  std::fflush(stdout);
}

const antenna::ArrayConfig& n16()
{
  static const antenna::ArrayConfig cfg(16, 275e9);
  return cfg;
}

const antenna::LobeModel& lobe16()
{
  static const auto lobe = antenna::fit_lobe_model(n16(), antenna::LobeSource::exact_fit);
  return lobe;
}

double ks_sorted(std::vector<double> s, const std::function<double(double)>& cdf)
{
  std::sort(s.begin(), s.end());
  return montecarlo::ks_distance(s, cdf);
}

channel::ChannelModel grid_model(double alpha, double mu, double beta, double a)
{
  const auto lobe = antenna::make_lobe_model(804.25, 0.05, antenna::LobeSource::exact_fit);
  const auto pm = pointing::make_pointing_model(lobe, {0.05 / std::sqrt(beta)}, a);
  return channel::make_channel_model(channel::make_alpha_mu(alpha, mu, 1.0), pm, 2e-3);
}

double quantile(const channel::ChannelModel& cm, double p)
{
  const double scale = cm.pointing.lobe.g0 * cm.h_l;
  double lo = std::log(scale * 1e-10);
  double hi = std::log(scale * 1e3);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i)
  {
    const double mid = 0.5 * (lo + hi);
    (channel::channel_cdf(std::exp(mid), cm) < p ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

std::string list(const std::vector<double>& v, const char* spec = "{:.4g}")
{
  std::string out;
  for (double x : v)
    out += (out.empty() ? "" : ", ") + fmt::format(fmt::runtime(spec), x);
  return out;
}

} // namespace

int main()
{
  criterion(1, "beamwidth fit B = 1.061 within 0.02, N in {4,8,16,32,64}", 5.0, [] {
    std::vector<double> products;
    double worst = 0.0;
    for (int n : {4, 8, 16, 32, 64})
    {
      products.push_back(antenna::solve_beamwidth(antenna::ArrayConfig(n, 275e9)) * n);
      worst = std::max(worst, std::abs(products.back() - 1.061));
    }
    return Outcome{worst <= 0.02, fmt::format("w_B N = [{}], max dev {:.4f} (tol 0.02)", list(products), worst)};
  });

  criterion(2, "peak gain G0 / (pi N^2) within 5%, N in {4,8,16,32}", 60.0, [] {
    std::vector<double> ratios;
    double worst = 0.0;
    for (int n : {4, 8, 16, 32})
    {
      ratios.push_back(antenna::normalization_g0(antenna::ArrayConfig(n, 275e9)) / (std::numbers::pi * n * n));
      worst = std::max(worst, std::abs(ratios.back() - 1.0));
    }
    return Outcome{worst <= 0.05, fmt::format("ratios = [{}], max dev {:.4f} (tol 0.05)", list(ratios), worst)};
  });

  criterion(3, "pointing PDF mass and CDF derivative, beta in {0.5,1,2,5,10,20}", 0.0, [] {
    double mass_err = 0.0;
    double slope_err = 0.0;
    for (double beta : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
    {
      const auto pm = pointing::make_pointing_model(lobe16(), {lobe16().w_b / std::sqrt(beta)});
      const double g0 = pm.lobe.g0;
      // h = G0 e^-t maps (0, G0] onto [0, inf).
      const auto mass = quadrature::integrate(
          [&](double t) { return pointing::pointing_pdf(g0 * std::exp(-t), pm) * g0 * std::exp(-t); }, 0.0,
          2000.0 / beta, 1e-13, 1e-300);
      mass_err = std::max(mass_err, std::abs(mass.value - 1.0));
      for (int i = 1; i < 50; ++i)
      {
        const double h = g0 * i / 50.0;
        const double step = 1e-5 * h;
        const double fd = (pointing::pointing_cdf(h + step, pm) - pointing::pointing_cdf(h - step, pm)) / (2.0 * step);
        slope_err = std::max(slope_err, std::abs(fd / pointing::pointing_pdf(h, pm) - 1.0));
      }
    }
    return Outcome{mass_err <= 1e-9 && slope_err <= 1e-6,
                   fmt::format("max |mass - 1| = {:.2e} (tol 1e-9), max derivative rel err = {:.2e} (tol 1e-6)",
                               mass_err, slope_err)};
  });

  criterion(4, "tractable pointing CDF: sup gap frozen at a = 80, ~100x smaller at a = 8000", 0.0, [] {
    const auto gap = [](double beta, double a) {
      const auto pm = pointing::make_pointing_model(lobe16(), {lobe16().w_b / std::sqrt(beta)}, a);
      double worst = 0.0;
      for (int i = 1; i <= 20000; ++i)
      {
        const double h = pm.lobe.g0 * i / 20000.0;
        worst = std::max(worst, std::abs(pointing::pointing_cdf(h, pm) - pointing::pointing_cdf_approx(h, pm)));
      }
      return worst;
    };
    const double g80 = gap(5.0, 80.0);
    const double g8000 = gap(5.0, 8000.0);
    double sweep = 0.0;
    for (double beta = 1.0; beta <= 20.0; beta += 0.5)
      sweep = std::max(sweep, gap(beta, 80.0));
    const double ratio = g80 / g8000;
    const bool pass = g80 <= 2.51e-3 && sweep <= 0.0127 && std::abs(ratio / 100.0 - 1.0) <= 0.05;
    return Outcome{pass, fmt::format("beta=5: gap {:.4e} (frozen 2.51e-3), a=8000 gap {:.4e}, ratio {:.2f} (100 +/- 5%); "
                                     "beta in [1,20]: sup {:.5f} (frozen 0.0127)",
                                     g80, g8000, ratio, sweep)};
  });

  criterion(5, "Monte Carlo vs main-lobe law, N=16, sigma = w_B/3, 1e6 samples", 120.0, [] {
    const auto pm = pointing::make_pointing_model(lobe16(), {lobe16().w_b / 3.0});
    const auto cdf = [&](double h) { return pointing::pointing_cdf(h, pm); };
    const auto exact = montecarlo::make_mc_config(1'000'000, 2024, 0, montecarlo::PatternMode::exact_array);
    const auto gauss = montecarlo::make_mc_config(1'000'000, 2024, 0, montecarlo::PatternMode::gaussian_lobe);
    const double ks_exact = ks_sorted(montecarlo::sample_pointing(exact, n16(), pm.jitter, lobe16()), cdf);
    const double ks_gauss = ks_sorted(montecarlo::sample_pointing(gauss, n16(), pm.jitter, lobe16()), cdf);
    return Outcome{ks_exact <= 0.01 && ks_gauss <= 0.002,
                   fmt::format("exact-pattern KS {:.4f} (tol 0.01), gaussian-lobe KS {:.4f} (tol 0.002)", ks_exact,
                               ks_gauss)};
  });

  criterion(6, "Whittaker tail identity, nu in [-10,10], u in [1e-4,30]", 0.0, [] {
    double worst = 0.0;
    for (double nu = -10.0; nu <= 10.0; nu += 0.25)
      for (int j = 0; j < 25; ++j)
      {
        const double u = 1e-4 * std::pow(30.0 / 1e-4, j / 24.0);
        const double closed = std::pow(u, -nu / 2.0) * std::exp(-u / 2.0) *
                              special_fn::whittaker_w({-nu / 2.0, (1.0 - nu) / 2.0, u});
        const double oracle = special_fn::tail_integral(nu, u);
        worst = std::max(worst, std::abs(closed / oracle - 1.0));
      }
    return Outcome{worst <= 1e-9, fmt::format("max rel err {:.2e} over 81 x 25 points (tol 1e-9)", worst)};
  });

  criterion(7, "channel closed forms vs convolution oracle, 27-point grid", 0.0, [] {
    double pdf_exact = 0.0;     // a = 1e5 against the exact pointing law
    double pdf_tractable = 0.0; // a = 80 against the same tractable law
    double cdf_slope = 0.0;
    for (double alpha : {1.5, 2.0, 3.0})
      for (double mu : {1.0, 2.0, 3.0})
        for (double beta : {2.0, 5.0, 15.0})
        {
          const auto tractable = grid_model(alpha, mu, beta, 80.0);
          const auto limit = grid_model(alpha, mu, beta, 1e5);
          const double lo = quantile(tractable, 0.01);
          const double hi = quantile(tractable, 0.99);
          for (int i = 0; i <= 20; ++i)
          {
            const double h = lo * std::pow(hi / lo, i / 20.0);
            pdf_exact = std::max(pdf_exact, std::abs(channel::channel_pdf(h, limit) /
                                                         channel::convolution_pdf(h, limit, channel::PointingLaw::exact) -
                                                     1.0));
            pdf_tractable = std::max(
                pdf_tractable,
                std::abs(channel::channel_pdf(h, tractable) /
                             channel::convolution_pdf(h, tractable, channel::PointingLaw::tractable) -
                         1.0));
          }
          for (int k = 1; k <= 10; ++k)
          {
            const double h = quantile(tractable, (k - 0.5) / 10.0);
            const double step = 1e-4 * h;
            const double fd =
                (channel::channel_cdf(h + step, tractable) - channel::channel_cdf(h - step, tractable)) / (2.0 * step);
            cdf_slope = std::max(cdf_slope, std::abs(fd / channel::channel_pdf(h, tractable) - 1.0));
          }
        }
    return Outcome{pdf_exact <= 1e-4 && cdf_slope <= 1e-4,
                   fmt::format("pdf vs exact-law oracle {:.2e} at a=1e5 (tol 1e-4), CDF derivative {:.2e} at 10 "
                               "quantiles (tol 1e-4); a=80 vs tractable-law oracle {:.2e}",
                               pdf_exact, cdf_slope, pdf_tractable)};
  });

  criterion(8, "outage at 275 GHz, gamma_th = 12 dB, sigma in {w_B/4, w_B/2, w_B, 2 w_B}", 300.0, [] {
    std::vector<double> z;
    std::vector<double> ks;
    std::vector<double> gap;
    for (double ratio : {0.25, 0.5, 1.0, 2.0})
    {
      cli::Scenario s;
      s.sigma_theta_over_wb = ratio;
      s.seed = 4242;
      const auto r = cli::resolve(s);
      const auto h = montecarlo::sample_channel(r.mc, r.channel, r.array);
      const auto est = montecarlo::outage_from_samples(h, r.channel, s.gamma_th);
      const double analytic = channel::outage_probability(s.gamma_th, r.channel).value;
      z.push_back(std::abs(analytic - est.probability) / est.standard_error);
      gap.push_back(std::abs(analytic - est.probability));
      ks.push_back(ks_sorted(h, [&](double x) { return channel::channel_cdf(x, r.channel); }));
    }
    const bool within = z[0] <= 3.0 && z[1] <= 3.0;
    const bool increasing = ks[0] < ks[1] && ks[1] < ks[2] && ks[2] < ks[3];
    return Outcome{within && increasing,
                   fmt::format("|analytic - MC| / SE = [{}] (first two <= 3: {}); channel KS = [{}] "
                               "(strictly increasing: {}); |outage gap| = [{}]",
                               list(z, "{:.2f}"), within ? "yes" : "no", list(ks), increasing ? "yes" : "no",
                               list(gap, "{:.2e}"))};
  });

  criterion(9, "validate report byte-identical across runs and worker counts", 0.0, [] {
    const auto report = [](const char* workers) {
      const char* argv[] = {"thzpoint", "validate", "--seed", "11", "--workers", workers};
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run(6, argv, out, err);
      return std::pair{code, out.str()};
    };
    const auto a = report("1");
    const auto b = report("1");
    const auto c = report("4");
    const bool same = !a.second.empty() && a == b && a == c;
    return Outcome{same, fmt::format("{} bytes; runs 1-worker x2 and 4-worker identical: {}", a.second.size(),
                                     same ? "yes" : "no")};
  });

  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
