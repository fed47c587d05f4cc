// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "thzpoint/channel.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace thzpoint::montecarlo
{

enum class PatternMode
{
  exact_array,  // h_p = G0 sqrt(G'_t G'_r) with the array factor
  gaussian_lobe // h_p = G0 exp(-(theta_t^2 + theta_r^2) / (2 w_B^2))
};

std::string_view to_string(PatternMode mode);
PatternMode pattern_mode_from_string(std::string_view name);

struct McConfig
{
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
  int histogram_bins = 0; // 0 selects Freedman-Diaconis
  PatternMode pattern_mode = PatternMode::exact_array;
  int workers = 0; // 0 uses the hardware concurrency; never changes results
};

constexpr std::uint64_t max_samples = 50'000'000;

// Validates 10^3 <= n_samples <= 5e7 and histogram_bins (0 or >= 20).
McConfig make_mc_config(std::uint64_t n_samples, std::uint64_t seed, int histogram_bins = 0,
                        PatternMode mode = PatternMode::exact_array, int workers = 0);

struct EmpiricalCdf
{
  std::vector<double> x; // distinct sample values, ascending
  std::vector<double> p; // fraction of samples <= x
};

struct Histogram
{
  std::vector<double> edges;
  std::vector<double> density;
};

struct McSummary
{
  std::size_t n = 0;
  EmpiricalCdf empirical_cdf;
  Histogram histogram_pdf;
  double ks_distance = 0.0;
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Pointing gains h_p with the given lobe (G0 and, in gaussian-lobe mode, w_B).
std::vector<double> sample_pointing(const McConfig& cfg, const antenna::ArrayConfig& array,
                                    const pointing::JitterParams& j, const antenna::LobeModel& lobe);

/// As above with the exact-fit lobe of the array.
std::vector<double> sample_pointing(const McConfig& cfg, const antenna::ArrayConfig& array,
                                    const pointing::JitterParams& j);

/// h_a = h_hat (g / mu)^(1/alpha), g ~ Gamma(mu, 1).
std::vector<double> sample_alpha_mu(const McConfig& cfg, const channel::AlphaMuParams& p);

/// h = h_L h_p h_a with independent pointing and fading streams. The
/// exact-array mode needs the array; gaussian-lobe uses cm.pointing.lobe.
std::vector<double> sample_channel(const McConfig& cfg, const channel::ChannelModel& cm,
                                   const std::optional<antenna::ArrayConfig>& array);

/// One-sample Kolmogorov-Smirnov distance; `sorted` must be ascending.
double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf);

/// ECDF, histogram, KS distance against `cdf` and the first two raw moments.
McSummary empirical_summary(std::vector<double> samples, const McConfig& cfg,
                            const std::function<double(double)>& cdf);

struct OutageEstimate
{
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

/// Fraction of channel samples with P_t h^2 / N_0 < gamma_th.
OutageEstimate outage_empirical(const McConfig& cfg, const channel::ChannelModel& cm, double gamma_th,
                                const std::optional<antenna::ArrayConfig>& array);

/// Same estimate from precomputed channel samples.
OutageEstimate outage_from_samples(const std::vector<double>& h, const channel::ChannelModel& cm, double gamma_th);

} // namespace thzpoint::montecarlo
