// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/cli.hpp"

#include "thzpoint/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <ostream>

namespace thzpoint::cli
{
namespace
{

constexpr const char* pattern_help = "Antenna pattern cut. CSV columns: theta_rad, exact_gain (G0 times the "
                                     "normalized array factor), gaussian_gain (G0 exp(-theta^2/w_B^2)).";
constexpr const char* pointing_help =
    "Pointing-gain law on (0, G0]. CSV columns: h_p, exact_value (main-lobe law), approx_value (tractable "
    "approximation), empirical_value (Monte Carlo histogram or ECDF; omitted with --no-mc). PDF rows sit at bin "
    "centres, CDF rows at right bin edges.";
constexpr const char* outage_help =
    "Outage probability against transmit power. CSV columns: pt_dbm, outage_analytic, outage_mc, mc_stderr.";
constexpr const char* validate_help =
    "Analytical expressions against quadrature oracles and Monte Carlo. Writes a JSON report "
    "(schemas/validate_report.schema.json); exit 0 when every threshold passes, 1 otherwise.";

// A flag value becomes a JSON number when it reads fully as one, else a string
// that the scenario parser reads with its unit.
nlohmann::json flag_value(const std::string& s)
{
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec == std::errc() && ptr == s.data() + s.size())
  {
    long long i = 0;
    const auto [iptr, iec] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (iec == std::errc() && iptr == s.data() + s.size())
      return i;
    return x;
  }
  return s;
}

struct Options
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<int> workers;
  std::string out;
  std::string format;

  std::optional<std::string> phi;
  std::optional<int> resolution;
  std::optional<std::string> theta_max;

  std::optional<std::string> kind;
  std::optional<int> points;
  bool no_mc = false;

  std::optional<std::string> gamma_th;
  std::vector<std::string> pt_sweep;
  bool pt_sweep_given = false;
};

// Folds flag overrides into the scenario document so they get the same
// parsing and error paths as the file.
Scenario build_scenario(const Options& o)
{
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty())
  {
    std::ifstream in(o.config, std::ios::binary);
    if (!in)
      throw config_error("config: cannot open '" + o.config + "'");
    try
    {
      doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e)
    {
      throw config_error(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
      throw config_error("config: the top level must be an object");
  }
  const auto set = [&](const char* section, const char* key, nlohmann::json value) {
    if (!doc.contains(section) || !doc[section].is_object())
      doc[section] = nlohmann::json::object();
    doc[section][key] = std::move(value);
  };
  if (o.seed)
    set("mc", "seed", *o.seed);
  if (o.samples)
    set("mc", "samples", *o.samples);
  if (o.workers)
    set("mc", "workers", *o.workers);
  if (o.phi)
    set("pattern", "phi", flag_value(*o.phi));
  if (o.resolution)
    set("pattern", "resolution", *o.resolution);
  if (o.theta_max)
    set("pattern", "theta_max", flag_value(*o.theta_max));
  if (o.kind)
    set("pointing", "kind", *o.kind);
  if (o.points)
    set("pointing", "points", *o.points);
  if (o.no_mc)
    set("pointing", "mc", false);
  if (o.gamma_th)
    set("outage", "gamma_th", flag_value(*o.gamma_th));
  if (o.pt_sweep_given)
  {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : o.pt_sweep)
      if (!p.empty())
        list.push_back(flag_value(p));
    set("outage", "pt_sweep", list);
  }
  return parse_scenario(doc.dump());
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"THz pointing-error channel model: curves and Monte-Carlo validation", "thzpoint"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "Scenario JSON file (defaults apply when omitted)");
  app.add_option("--seed", o.seed, "Monte-Carlo seed (overrides mc.seed)");
  app.add_option("--samples", o.samples, "Monte-Carlo sample count (overrides mc.samples)");
  app.add_option("--workers", o.workers, "Worker threads, 0 for all cores; results do not depend on it");
  app.add_option("--out", o.out, "Output file (stdout when omitted)");
  app.add_option("--format", o.format, "csv or json (default csv, json for validate)")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* pattern = app.add_subcommand("pattern", pattern_help);
  pattern->add_option("--phi", o.phi, "Azimuth of the cut, e.g. 0.785 or \"45 deg\"");
  pattern->add_option("--resolution", o.resolution, "Number of theta steps");
  pattern->add_option("--theta-max", o.theta_max, "Largest theta of the cut");

  auto* pointing = app.add_subcommand("pointing", pointing_help);
  pointing->add_option("--kind", o.kind, "pdf or cdf")->check(CLI::IsMember({"pdf", "cdf"}));
  pointing->add_option("--points", o.points, "Number of grid points on (0, G0]");
  pointing->add_flag("--no-mc", o.no_mc, "Skip the empirical column");

  auto* outage = app.add_subcommand("outage", outage_help);
  outage->add_option("--gamma-th", o.gamma_th, "SNR threshold, e.g. \"12 dB\"");
  outage->add_option("--pt-sweep", o.pt_sweep, "Comma-separated transmit powers, e.g. \"20 dBm,30 dBm\"")
      ->delimiter(',')
      ->expected(0, -1);

  auto* validate = app.add_subcommand("validate", validate_help);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  o.pt_sweep_given = outage->count("--pt-sweep") > 0;

  const bool is_validate = validate->parsed();
  const Format format = o.format.empty() ? (is_validate ? Format::json : Format::csv)
                                         : (o.format == "json" ? Format::json : Format::csv);

  std::string text;
  int code = 0;
  try
  {
    const auto r = resolve(build_scenario(o));
    if (pattern->parsed())
      text = render(cmd_pattern(r), format);
    else if (pointing->parsed())
      text = render(cmd_pointing(r), format);
    else if (outage->parsed())
      text = render(cmd_outage(r), format);
    else
    {
      const auto report = cmd_validate(r);
      text = render(report, r, format);
      if (!report.passed)
      {
        code = 1;
        err << "validation failed:";
        for (const auto& c : report.checks)
          if (c.status == "fail")
            err << ' ' << c.name;
        err << '\n';
      }
    }
  }
  catch (const config_error& e)
  {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  catch (const degenerate_parameter_error& e)
  {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  catch (const error& e)
  {
    err << "computation failed: " << e.what() << '\n';
    return 1;
  }

  if (o.out.empty())
    out << text;
  else
  {
    std::ofstream file(o.out, std::ios::binary);
    if (!(file << text))
    {
      err << "error: cannot write '" << o.out << "'\n";
      return 2;
    }
  }
  return code;
}

} // namespace thzpoint::cli
