// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "thzpoint/error.hpp"
#include "thzpoint/montecarlo.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thzpoint::cli
{

// Raised for malformed or invalid configuration; the message starts with the
// offending field path. Maps to exit code 2.
struct config_error : error
{
  using error::error;
};

enum class Format
{
  csv,
  json
};

enum class ChannelLaw
{
  exact,  // quadrature with the exact pointing law
  tractable // closed form with the tractable law
};

struct Scenario
{
  int n = 16;
  double carrier_frequency = 275e9;

  std::optional<double> sigma_theta;       // radians
  std::optional<double> sigma_theta_over_wb = 0.25;

  channel::AlphaMuParams fading{2.0, 1.0, 1.0};

  double distance = 10.0;
  double absorption_coeff = 0.0;
  double tx_power = 1.0;                  // W
  double noise_power = 1.995262314968883e-17; // W (-137 dBm)

  ChannelLaw law = ChannelLaw::tractable;
  double a = pointing::default_log_approx_constant;
  antenna::LobeSource lobe = antenna::LobeSource::exact_fit;

  std::uint64_t seed = 1;
  std::uint64_t n_samples = 1'000'000;
  montecarlo::PatternMode pattern_mode = montecarlo::PatternMode::exact_array;
  int workers = 0;

  double pattern_phi = 0.0;
  int pattern_resolution = 400;
  double pattern_theta_max = 0.5;

  bool pointing_cdf = false;
  int pointing_points = 200;
  bool pointing_mc = true;

  double gamma_th = 15.848931924611133; // 12 dB
  std::vector<double> pt_sweep_dbm{10, 14, 18, 22, 26, 30, 34, 38, 42, 46, 50};
};

/// Parses a scenario from JSON text. Unknown keys and bad values raise
/// config_error naming the field path, e.g. "link.tx_power".
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// A scenario turned into validated model objects.
struct Resolved
{
  Scenario scenario;
  antenna::ArrayConfig array;
  antenna::LobeModel lobe;
  pointing::PointingModel pointing;
  channel::ChannelModel channel;
  montecarlo::McConfig mc;
};

Resolved resolve(const Scenario& s);

struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string render(const Table& t, Format f);

/// theta_rad, exact_gain, gaussian_gain along the cut phi.
Table cmd_pattern(const Resolved& r);

/// h_p, exact_value, approx_value[, empirical_value] on (0, G0].
Table cmd_pointing(const Resolved& r);

/// pt_dbm, outage_analytic, outage_mc, mc_stderr.
Table cmd_outage(const Resolved& r);

struct Check
{
  std::string name;
  double value = 0.0;
  std::optional<double> threshold; // none: reported only
  std::string status;              // pass | fail | warning | info
  std::string note;
};

struct Report
{
  std::vector<Check> checks;
  bool passed = true;
};

/// Analytical-versus-oracle and analytical-versus-Monte-Carlo checks.
Report cmd_validate(const Resolved& r);

std::string render(const Report& report, const Resolved& r, Format f);

/// Full command line: returns the process exit code (0 pass, 1 validation
/// or computation failure, 2 usage or configuration error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace thzpoint::cli
