// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/montecarlo.hpp"

#include "thzpoint/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace thzpoint::montecarlo
{
namespace
{

constexpr std::uint64_t block_size = 1u << 16;

// Stream tags keep pointing and fading draws independent for one seed.
constexpr std::uint64_t pointing_stream = 1;
constexpr std::uint64_t fading_stream = 2;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t block)
{
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ block));
}

int worker_count(const McConfig& cfg, std::uint64_t blocks)
{
  int n = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, n);
  return static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(n), blocks));
}

// fill(engine, first, last) writes samples [first, last) of `out`. Blocks are
// claimed dynamically; each block has its own engine, so the output does not
// depend on which worker ran it.
template <class Fill>
std::vector<double> run_blocks(const McConfig& cfg, std::uint64_t stream, Fill&& fill)
{
  std::vector<double> out(cfg.n_samples);
  const std::uint64_t blocks = (cfg.n_samples + block_size - 1) / block_size;
  std::atomic<std::uint64_t> next{0};
  const auto work = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++)
    {
      auto engine = block_engine(cfg.seed, stream, b);
      const std::uint64_t first = b * block_size;
      fill(engine, out.data() + first, out.data() + std::min(cfg.n_samples, first + block_size));
    }
  };
  const int n = worker_count(cfg, blocks);
  std::vector<std::jthread> threads;
  for (int i = 1; i < n; ++i)
    threads.emplace_back(work);
  work();
  return out;
}

} // namespace

std::string_view to_string(PatternMode mode)
{
  return mode == PatternMode::exact_array ? "exact-array" : "gaussian-lobe";
}

PatternMode pattern_mode_from_string(std::string_view name)
{
  if (name == "exact-array")
    return PatternMode::exact_array;
  if (name == "gaussian-lobe")
    return PatternMode::gaussian_lobe;
  throw domain_error("unknown pattern mode '" + std::string(name) + "' (expected exact-array or gaussian-lobe)");
}

McConfig make_mc_config(std::uint64_t n_samples, std::uint64_t seed, int histogram_bins, PatternMode mode,
                        int workers)
{
  if (n_samples < 1000 || n_samples > max_samples)
    throw domain_error("mc: samples must lie in [1000, 50000000], got " + std::to_string(n_samples));
  if (histogram_bins != 0 && histogram_bins < 20)
    throw domain_error("mc: histogram_bins must be 0 (automatic) or >= 20");
  if (workers < 0)
    throw domain_error("mc: workers must be >= 0");
  return {n_samples, seed, histogram_bins, mode, workers};
}

std::vector<double> sample_pointing(const McConfig& cfg, const antenna::ArrayConfig& array,
                                    const pointing::JitterParams& j, const antenna::LobeModel& lobe)
{
  pointing::make_jitter(j.sigma_theta);
  const double two_w2 = 2.0 * lobe.w_b * lobe.w_b;
  const auto fill = [&](std::mt19937_64& engine, double* first, double* last) {
    std::normal_distribution<double> normal(0.0, j.sigma_theta);
    for (double* out = first; out != last; ++out)
    {
      const double tx = normal(engine);
      const double ty = normal(engine);
      const double rx = normal(engine);
      const double ry = normal(engine);
      const double theta_t = pointing::combine_orientation(tx, ty);
      const double theta_r = pointing::combine_orientation(rx, ry);
      if (cfg.pattern_mode == PatternMode::gaussian_lobe)
      {
        *out = lobe.g0 * std::exp(-(theta_t * theta_t + theta_r * theta_r) / two_w2);
      }
      else
      {
        const double gt = antenna::array_factor_gain(array, theta_t, pointing::orientation_azimuth(tx, ty));
        const double gr = antenna::array_factor_gain(array, theta_r, pointing::orientation_azimuth(rx, ry));
        *out = lobe.g0 * std::sqrt(gt * gr);
      }
    }
  };
  return run_blocks(cfg, pointing_stream, fill);
}

std::vector<double> sample_pointing(const McConfig& cfg, const antenna::ArrayConfig& array,
                                    const pointing::JitterParams& j)
{
  return sample_pointing(cfg, array, j, antenna::fit_lobe_model(array, antenna::LobeSource::exact_fit));
}

std::vector<double> sample_alpha_mu(const McConfig& cfg, const channel::AlphaMuParams& p)
{
  channel::make_alpha_mu(p.alpha, p.mu, p.h_hat);
  const auto fill = [&](std::mt19937_64& engine, double* first, double* last) {
    std::gamma_distribution<double> gamma(p.mu, 1.0);
    for (double* out = first; out != last; ++out)
      *out = p.h_hat * std::pow(gamma(engine) / p.mu, 1.0 / p.alpha);
  };
  return run_blocks(cfg, fading_stream, fill);
}

std::vector<double> sample_channel(const McConfig& cfg, const channel::ChannelModel& cm,
                                   const std::optional<antenna::ArrayConfig>& array)
{
  if (cfg.pattern_mode == PatternMode::exact_array && !array)
    throw domain_error("mc: exact-array sampling needs the array configuration");
  // The gaussian-lobe path ignores the array; any N will do.
  const auto cfg_array = array ? *array : antenna::ArrayConfig(1, 1e9);
  auto h = sample_pointing(cfg, cfg_array, cm.pointing.jitter, cm.pointing.lobe);
  const auto fading = sample_alpha_mu(cfg, cm.fading);
  for (std::size_t i = 0; i < h.size(); ++i)
    h[i] *= cm.h_l * fading[i];
  return h;
}

double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf)
{
  const std::size_t n = sorted.size();
  if (n == 0)
    throw domain_error("ks_distance: empty sample");
  double d = 0.0;
  std::size_t i = 0;
  while (i < n)
  {
    // Tied values form one ECDF step from i/n to j/n.
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i])
      ++j;
    // Left limits pair with left limits so atoms of F are handled too.
    const double below = cdf(std::nextafter(sorted[i], -std::numeric_limits<double>::infinity()));
    const double at = cdf(sorted[i]);
    d = std::max({d, std::abs(below - static_cast<double>(i) / n), std::abs(at - static_cast<double>(j) / n)});
    i = j;
  }
  return d;
}

McSummary empirical_summary(std::vector<double> samples, const McConfig& cfg,
                            const std::function<double(double)>& cdf)
{
  if (samples.empty())
    throw domain_error("empirical_summary: empty sample");
  McSummary s;
  s.n = samples.size();
  const double n = static_cast<double>(s.n);

  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : samples)
  {
    sum += v;
    sum2 += v * v;
  }
  s.mean = sum / n;
  s.second_moment = sum2 / n;

  std::sort(samples.begin(), samples.end());
  s.ks_distance = ks_distance(samples, cdf);

  for (std::size_t i = 0; i < samples.size(); ++i)
  {
    if (!s.empirical_cdf.x.empty() && s.empirical_cdf.x.back() == samples[i])
      s.empirical_cdf.p.back() = (i + 1) / n;
    else
    {
      s.empirical_cdf.x.push_back(samples[i]);
      s.empirical_cdf.p.push_back((i + 1) / n);
    }
  }
  s.empirical_cdf.p.back() = 1.0;

  double lo = samples.front();
  double hi = samples.back();
  if (!(hi > lo))
  {
    const double half = 0.5e-6 * std::max(1.0, std::abs(lo));
    lo -= half;
    hi += half;
  }
  int bins = cfg.histogram_bins;
  if (bins == 0)
  {
    // Freedman-Diaconis: width 2 IQR n^(-1/3)
    const double iqr = samples[static_cast<std::size_t>(0.75 * (n - 1))] - samples[static_cast<std::size_t>(0.25 * (n - 1))];
    const double width = 2.0 * iqr / std::cbrt(n);
    const double raw = width > 0.0 ? std::ceil((hi - lo) / width) : 20.0;
    bins = static_cast<int>(std::clamp(raw, 20.0, 10000.0));
  }
  const double width = (hi - lo) / bins;
  auto& hist = s.histogram_pdf;
  hist.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    hist.edges[b] = lo + width * b;
  hist.edges.back() = hi;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : samples)
  {
    const auto b = static_cast<std::size_t>(std::clamp((v - lo) / width, 0.0, bins - 1.0));
    ++counts[b];
  }
  hist.density.resize(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b)
    hist.density[b] = counts[b] / (n * width);
  return s;
}

OutageEstimate outage_from_samples(const std::vector<double>& h, const channel::ChannelModel& cm, double gamma_th)
{
  if (!cm.link)
    throw domain_error("outage: the channel model has no link budget");
  if (!(gamma_th >= 0.0))
    throw domain_error("outage: gamma_th must be non-negative");
  if (h.empty())
    throw domain_error("outage: empty sample");
  const double threshold = std::sqrt(cm.link->noise_power * gamma_th / cm.link->tx_power);
  const auto below = std::count_if(h.begin(), h.end(), [&](double v) { return v < threshold; });
  OutageEstimate e;
  e.n = h.size();
  e.probability = static_cast<double>(below) / e.n;
  e.standard_error = std::sqrt(e.probability * (1.0 - e.probability) / e.n);
  return e;
}

OutageEstimate outage_empirical(const McConfig& cfg, const channel::ChannelModel& cm, double gamma_th,
                                const std::optional<antenna::ArrayConfig>& array)
{
  return outage_from_samples(sample_channel(cfg, cm, array), cm, gamma_th);
}

} // namespace thzpoint::montecarlo
