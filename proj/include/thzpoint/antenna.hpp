// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace thzpoint::antenna
{

constexpr double speed_of_light = 299792458.0;

// w_B * N for the standard half-wavelength array.
constexpr double beamwidth_constant = 1.061;

// Uniform N x N broadside planar array with half-wavelength spacing.
class ArrayConfig
{
public:
  ArrayConfig(int n_elements_per_side, double carrier_frequency_hz);

  int n() const { return n_; }
  double carrier_frequency() const { return carrier_frequency_; }
  double wavelength() const { return speed_of_light / carrier_frequency_; }
  double wavenumber() const;
  double spacing() const { return 0.5 * wavelength(); }
  double steering_phase_x() const { return 0.0; }

private:
  int n_;
  double carrier_frequency_;
};

enum class LobeSource
{
  exact_fit,
  closed_form_approx
};

std::string_view to_string(LobeSource source);
LobeSource lobe_source_from_string(std::string_view name);

// Gaussian main lobe G0 exp(-theta^2 / w_B^2).
struct LobeModel
{
  double g0 = 1.0;
  double w_b = 0.1;
  LobeSource source = LobeSource::closed_form_approx;
};

// Validates 0 < w_b < pi/2 and g0 > 0.
LobeModel make_lobe_model(double g0, double w_b, LobeSource source);

/// Normalized array gain G'(theta, phi) in [0, 1]; 1 at boresight.
double array_factor_gain(const ArrayConfig& cfg, double theta, double phi);

/// Peak gain G0 = 4 pi / (integral of G' sin(theta) over the front
/// half-space theta <= pi/2), i.e. the array radiates forward only. Nested
/// adaptive quadrature over one quadrant in phi (G' is symmetric under
/// phi -> -phi and phi -> pi - phi). N = 1 gives 2.
double normalization_g0(const ArrayConfig& cfg);

/// The 1/e beamwidth: root of G'(w, 0) = e^-1 on (0, first null).
/// Throws domain_error for N = 1, which has no such angle.
double solve_beamwidth(const ArrayConfig& cfg);

LobeModel fit_lobe_model(const ArrayConfig& cfg, LobeSource mode);

double gaussian_gain(const LobeModel& model, double theta);

} // namespace thzpoint::antenna
