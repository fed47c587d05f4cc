// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/error.hpp"
#include "thzpoint/montecarlo.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace thzpoint;
using namespace thzpoint::montecarlo;

namespace
{

const antenna::ArrayConfig n16(16, 275e9);

const antenna::LobeModel& exact_lobe()
{
  static const auto lobe = antenna::fit_lobe_model(n16, antenna::LobeSource::exact_fit);
  return lobe;
}

double ks_pointing(const McConfig& cfg, double sigma, const antenna::LobeModel& model_lobe)
{
  auto s = sample_pointing(cfg, n16, {sigma}, exact_lobe());
  std::sort(s.begin(), s.end());
  const auto pm = pointing::make_pointing_model(model_lobe, {sigma});
  return ks_distance(s, [&](double h) { return pointing::pointing_cdf(h, pm); });
}

} // namespace

TEST_CASE("config")
{
  CHECK_THROWS_AS(make_mc_config(999, 1), domain_error);
  CHECK_THROWS_AS(make_mc_config(max_samples + 1, 1), domain_error);
  CHECK_THROWS_AS(make_mc_config(1000, 1, 10), domain_error);
  CHECK(make_mc_config(1000, 1, 20).histogram_bins == 20);
  CHECK(pattern_mode_from_string(to_string(PatternMode::gaussian_lobe)) == PatternMode::gaussian_lobe);
  CHECK_THROWS_AS(pattern_mode_from_string("array"), domain_error);
}

TEST_CASE("determinism across seeds and workers")
{
  const auto one = make_mc_config(200'000, 5, 0, PatternMode::exact_array, 1);
  const auto four = make_mc_config(200'000, 5, 0, PatternMode::exact_array, 4);
  const auto a = sample_pointing(one, n16, {0.02}, exact_lobe());
  const auto b = sample_pointing(four, n16, {0.02}, exact_lobe());
  CHECK(a == b);
  CHECK(a == sample_pointing(one, n16, {0.02}, exact_lobe()));
  const auto other = make_mc_config(200'000, 6, 0, PatternMode::exact_array, 1);
  CHECK(a != sample_pointing(other, n16, {0.02}, exact_lobe()));

  const auto p = channel::make_alpha_mu(2.0, 1.5, 1.0);
  CHECK(sample_alpha_mu(one, p) == sample_alpha_mu(four, p));
}

TEST_CASE("sample_pointing")
{
  const auto cfg = make_mc_config(10'000, 3);
  for (double h : sample_pointing(cfg, n16, {1e-9}, exact_lobe()))
    CHECK(h == doctest::Approx(exact_lobe().g0).epsilon(1e-12));

  // Model-consistent sampler: KS at the sampling-noise level for beta in [1, 20].
  const auto gauss = make_mc_config(1'000'000, 17, 0, PatternMode::gaussian_lobe);
  for (double beta : {1.0, 5.0, 20.0})
  {
    CAPTURE(beta);
    CHECK(ks_pointing(gauss, exact_lobe().w_b / std::sqrt(beta), exact_lobe()) <= 0.002);
  }

  // Exact pattern: the array is Gaussian with width sqrt(12)/(pi N) near
  // boresight, not the 1/e width, so the main-lobe law is off by a fixed
  // KS of about 0.05 at small sigma; with the curvature width it nearly closes.
  const auto exact = make_mc_config(1'000'000, 17, 0, PatternMode::exact_array);
  const double small = ks_pointing(exact, 0.02, exact_lobe());
  CHECK(small > 0.03);
  CHECK(small < 0.06);
  const auto curvature = antenna::make_lobe_model(exact_lobe().g0, std::sqrt(12.0) / (std::numbers::pi * 16.0),
                                                  antenna::LobeSource::exact_fit);
  CHECK(ks_pointing(exact, 0.02, curvature) <= 0.012);

  // Side lobes: the gap grows with sigma.
  const double narrow = ks_pointing(exact, exact_lobe().w_b / 4.0, exact_lobe());
  const double wide = ks_pointing(exact, 4.0 * exact_lobe().w_b, exact_lobe());
  CHECK(wide > narrow);
}

TEST_CASE("sample_alpha_mu")
{
  const auto cfg = make_mc_config(1'000'000, 23);
  const auto rayleigh = channel::make_alpha_mu(2.0, 1.0, 1.0);
  auto s = sample_alpha_mu(cfg, rayleigh);
  std::sort(s.begin(), s.end());
  CHECK(ks_distance(s, [](double h) { return -std::expm1(-h * h); }) <= 0.002);

  const auto p = channel::make_alpha_mu(3.0, 2.0, 1.2);
  const auto samples = sample_alpha_mu(cfg, p);
  const auto summary = empirical_summary(samples, make_mc_config(1'000'000, 23, 60),
                                         [&](double h) { return channel::alpha_mu_cdf(h, p); });
  const double mean = 1.2 * std::tgamma(2.0 + 1.0 / 3.0) / (std::cbrt(2.0) * std::tgamma(2.0));
  const double second = 1.44 * std::tgamma(2.0 + 2.0 / 3.0) / (std::pow(2.0, 2.0 / 3.0) * std::tgamma(2.0));
  const double se = std::sqrt((second - mean * mean) / 1e6);
  CHECK(std::abs(summary.mean - mean) <= 3.0 * se);

  // Chi-square goodness of fit on bins with at least 5 expected counts.
  const auto& hist = summary.histogram_pdf;
  double chi2 = 0.0;
  int dof = -1;
  for (std::size_t b = 0; b < hist.density.size(); ++b)
  {
    const double lo = hist.edges[b];
    const double hi = hist.edges[b + 1];
    const double expected = 1e6 * (channel::alpha_mu_cdf(hi, p) - channel::alpha_mu_cdf(lo, p));
    if (expected < 5.0)
      continue;
    const double observed = hist.density[b] * (hi - lo) * 1e6;
    chi2 += (observed - expected) * (observed - expected) / expected;
    ++dof;
  }
  const boost::math::chi_squared dist(dof);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);
}

TEST_CASE("sample_channel")
{
  const auto cfg = make_mc_config(1'000'000, 29, 0, PatternMode::gaussian_lobe);
  const auto fading = channel::make_alpha_mu(2.0, 1.0, 1.0);

  // Negligible jitter: h / (G0 h_L) is Rayleigh.
  const auto still = channel::make_channel_model(fading, pointing::make_pointing_model(exact_lobe(), {1e-7}), 1e-9);
  auto h = sample_channel(cfg, still, std::nullopt);
  for (auto& v : h)
    v /= exact_lobe().g0 * 1e-9;
  std::sort(h.begin(), h.end());
  CHECK(ks_distance(h, [](double x) { return -std::expm1(-x * x); }) <= 0.002);

  const auto ks_channel = [&](PatternMode mode, double sigma) {
    auto c = cfg;
    c.pattern_mode = mode;
    const auto cm = channel::make_channel_model(fading, pointing::make_pointing_model(exact_lobe(), {sigma}), 1e-9);
    auto s = sample_channel(c, cm, n16);
    std::sort(s.begin(), s.end());
    return ks_distance(s, [&](double x) { return channel::channel_cdf(x, cm); });
  };
  const double small = ks_channel(PatternMode::exact_array, exact_lobe().w_b / 4.0);
  CHECK(small <= 0.01);
  CHECK(ks_channel(PatternMode::exact_array, 2.0 * exact_lobe().w_b) > small);
  CHECK(ks_channel(PatternMode::gaussian_lobe, exact_lobe().w_b / 2.0) <= 0.002);

  auto exact = cfg;
  exact.pattern_mode = PatternMode::exact_array;
  CHECK_THROWS_AS(sample_channel(exact, still, std::nullopt), domain_error);
}

TEST_CASE("empirical_summary")
{
  const auto cfg = make_mc_config(1000, 1);
  const auto flat = empirical_summary(std::vector<double>(1000, 2.5), cfg, [](double x) { return x < 2.5 ? 0.0 : 1.0; });
  REQUIRE(flat.empirical_cdf.x.size() == 1);
  CHECK(flat.empirical_cdf.x[0] == 2.5);
  CHECK(flat.empirical_cdf.p[0] == 1.0);
  CHECK(flat.ks_distance == 0.0);
  CHECK(flat.mean == 2.5);
  CHECK(flat.second_moment == 6.25);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> samples(100'000);
  for (auto& v : samples)
    v = u(rng);
  const auto s = empirical_summary(samples, cfg, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(s.ks_distance <= 5.0 / std::sqrt(1e5));
  CHECK(s.empirical_cdf.p.back() == 1.0);
  CHECK(std::is_sorted(s.empirical_cdf.p.begin(), s.empirical_cdf.p.end()));
  CHECK(std::is_sorted(s.empirical_cdf.x.begin(), s.empirical_cdf.x.end()));
  double integral = 0.0;
  for (std::size_t b = 0; b < s.histogram_pdf.density.size(); ++b)
    integral += s.histogram_pdf.density[b] * (s.histogram_pdf.edges[b + 1] - s.histogram_pdf.edges[b]);
  CHECK(std::abs(integral - 1.0) <= 1e-12);
  CHECK(s.histogram_pdf.density.size() >= 20);

  // Strictly monotone relabeling leaves KS unchanged.
  std::vector<double> relabeled(samples.size());
  std::transform(samples.begin(), samples.end(), relabeled.begin(), [](double x) { return std::exp(3.0 * x); });
  const auto r = empirical_summary(relabeled, cfg, [](double y) { return std::clamp(std::log(y) / 3.0, 0.0, 1.0); });
  CHECK(r.ks_distance == doctest::Approx(s.ks_distance).epsilon(1e-9));

  CHECK_THROWS_AS(empirical_summary({}, cfg, [](double) { return 0.0; }), domain_error);
}

TEST_CASE("outage_empirical")
{
  const auto cfg = make_mc_config(1'000'000, 37, 0, PatternMode::gaussian_lobe);
  const auto link = channel::make_link_budget(10.0, 275e9, 0.0, 1.0, std::pow(10.0, -13.7) * 1e-3);
  const auto pm = pointing::make_pointing_model(exact_lobe(), {exact_lobe().w_b / 4.0});
  const auto cm = channel::make_channel_model(channel::make_alpha_mu(2.0, 1.0, 1.0), pm, link);
  const auto h = sample_channel(cfg, cm, std::nullopt);

  CHECK(outage_from_samples(h, cm, 0.0).probability == 0.0);
  CHECK(outage_from_samples(h, cm, 1e30).probability == 1.0);

  const double gamma = std::pow(10.0, 1.2);
  const auto est = outage_from_samples(h, cm, gamma);
  CHECK(est.n == 1'000'000);
  CHECK(est.standard_error == doctest::Approx(std::sqrt(est.probability * (1 - est.probability) / 1e6)));
  CHECK(std::abs(channel::outage_probability(gamma, cm).value - est.probability) <= 3.0 * est.standard_error);
  CHECK(outage_empirical(cfg, cm, gamma, std::nullopt).probability == est.probability);
}
