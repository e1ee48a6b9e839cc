#pragma once

// Analog frontend of one RF chain: phase shifters (PS, frequency-flat) plus
// true-time-delay lines (TTD, frequency-proportional phase). The design maps
// a prescribed angle sweep (theta_0 at f=0 to theta_c at f=F) onto the PS
// parameter phi and a per-antenna delay increment, and exposes the resulting
// beam direction and its grating (beam split) aliases at any subcarrier.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "wideband.hpp"

namespace squintsense {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct FrontendDesign {
  SystemConfig config;
  double theta0_deg = 0.0;  // beam direction at f = 0
  double thetac_deg = 0.0;  // beam direction at f = F
  double ps_phase = 0.0;    // phi = (P/2) sin(theta_0), cycles per antenna
  double ttd_slope = 0.0;   // per-antenna delay increment t_m/(m-1), seconds

  // The raw slope may be negative (ascending sweeps). Hardware needs
  // nonnegative delays; adding a common offset to every line only multiplies
  // the response by a scalar phase, so gains are unchanged. This view applies
  // offset max(0, -(M-1)*ttd_slope), making the smallest delay exactly 0.
  std::vector<double> physical_delays() const {
    const std::size_t m_count = config.antenna_count;
    const double offset =
        std::max(0.0, -static_cast<double>(m_count - 1) * ttd_slope);
    std::vector<double> delays(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
      delays[m] = static_cast<double>(m) * ttd_slope + offset;
    }
    return delays;
  }
};

struct SplitAliasSet {
  double base_deg = 0.0;            // the main (non-aliased) direction
  std::vector<double> aliases_deg;  // feasible grating-lobe directions
  std::vector<int> z_values;        // grating order Z per alias, nonzero
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// g(f): entry m = exp(j 2 pi (m-1) phi) * exp(-j 2 pi f t_m).
inline cvector frontend_response(const FrontendDesign& design,
                                 double freq_hz) {
  if (freq_hz < 0.0 || freq_hz > design.config.bandwidth_hz) {
    throw std::domain_error("frontend_response: freq_hz outside [0, F]");
  }
  const std::size_t m_count = design.config.antenna_count;
  cvector g(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double cycles =
        static_cast<double>(m) * (design.ps_phase - freq_hz * design.ttd_slope);
    g[m] = detail::unit_phase(cycles);
  }
  return g;
}

// Designs phi and the TTD slope so that the chain points at theta_0 at f=0
// and at theta_c at f=F:
//   phi       = (P/2) sin(theta_0)
//   ttd_slope = (P/2) [sin(theta_0) - sin(theta_c)(1 + F/f_c)] / F
inline FrontendDesign design_frontend(const SystemConfig& config,
                                      double theta0_deg, double thetac_deg) {
  config.validate();
  if (!(theta0_deg > -90.0) || !(theta0_deg < 90.0) ||
      !(thetac_deg > -90.0) || !(thetac_deg < 90.0)) {
    throw std::invalid_argument(
        "design_frontend: angles must be in (-90, 90)");
  }
  const double s0 = sin_deg(theta0_deg);
  const double sc = sin_deg(thetac_deg);
  if (s0 == sc) {
    throw std::invalid_argument(
        "design_frontend: degenerate range, sin(theta_0) == sin(theta_c)");
  }
  const double half_p = config.spacing_ratio / 2.0;
  FrontendDesign design;
  design.config = config;
  design.theta0_deg = theta0_deg;
  design.thetac_deg = thetac_deg;
  design.ps_phase = half_p * s0;
  design.ttd_slope =
      half_p * (s0 - sc * (1.0 + config.bandwidth_hz / config.carrier_hz)) /
      config.bandwidth_hz;
  return design;
}

namespace detail {

// sin of the main beam direction at offset f:
//   sin(theta(f)) = [sin(theta_0) - f (2/P) ttd_slope] / (1 + f/f_c)
inline double beam_sin(const FrontendDesign& design, double freq_hz) {
  const double s0 = sin_deg(design.theta0_deg);
  const double lam_over_d = 2.0 / design.config.spacing_ratio;
  return (s0 - freq_hz * lam_over_d * design.ttd_slope) /
         (1.0 + freq_hz / design.config.carrier_hz);
}

// sin of the grating alias of order z at offset f (may land outside [-1, 1],
// in which case the alias does not radiate).
inline double alias_sin(const FrontendDesign& design, int z, double freq_hz) {
  return beam_sin(design, freq_hz) -
         2.0 * static_cast<double>(z) /
             (design.config.spacing_ratio *
              (1.0 + freq_hz / design.config.carrier_hz));
}

// Largest grating order that can possibly land in [-1, 1] anywhere in band.
inline int alias_order_bound(const SystemConfig& config) {
  return static_cast<int>(std::ceil(
      config.spacing_ratio * (1.0 + config.bandwidth_hz / config.carrier_hz)));
}

}  // namespace detail

// Main beam direction at offset f, in degrees. Monotone in f with the sign
// of sin(theta_c) - sin(theta_0).
inline double beam_direction(const FrontendDesign& design, double freq_hz) {
  if (freq_hz < 0.0 || freq_hz > design.config.bandwidth_hz) {
    throw std::domain_error("beam_direction: freq_hz outside [0, F]");
  }
  return asin_deg(detail::beam_sin(design, freq_hz));
}

// All grating aliases of a direction at offset f:
//   sin(theta^s) = sin(theta) - 2Z / (P (1 + f/f_c)), Z nonzero integer,
// kept when |sin(theta^s)| <= 1. Empty for P <= 1 at f = 0; for P <= 1 and
// f > 0 an alias appears once sin(theta) >= 2/(1 + f/f_c) - 1 (band-edge
// grating onset), so the set is not structurally empty for P = 1.
inline SplitAliasSet split_angles(const SystemConfig& config, double aod_deg,
                                  double freq_hz) {
  if (!(aod_deg > -90.0) || !(aod_deg < 90.0)) {
    throw std::domain_error("split_angles: aod_deg outside (-90, 90)");
  }
  const double base_sin = sin_deg(aod_deg);
  const double shift_unit =
      2.0 / (config.spacing_ratio * (1.0 + freq_hz / config.carrier_hz));
  SplitAliasSet set;
  set.base_deg = aod_deg;
  const int z_bound = detail::alias_order_bound(config);
  for (int z = -z_bound; z <= z_bound; ++z) {
    if (z == 0) {
      continue;
    }
    const double alias_sin = base_sin - static_cast<double>(z) * shift_unit;
    if (alias_sin >= -1.0 && alias_sin <= 1.0) {
      set.aliases_deg.push_back(asin_deg(alias_sin));
      set.z_values.push_back(z);
    }
  }
  return set;
}

// Tabulates beam_direction and its aliases over a frequency grid.
inline std::vector<std::pair<double, SplitAliasSet>> beam_trajectory(
    const FrontendDesign& design, const std::vector<double>& grid_hz) {
  std::vector<std::pair<double, SplitAliasSet>> trajectory;
  trajectory.reserve(grid_hz.size());
  double prev = -1.0;
  for (double f : grid_hz) {
    if (f < 0.0 || f > design.config.bandwidth_hz || f <= prev) {
      throw std::domain_error(
          "beam_trajectory: grid must be strictly increasing within [0, F]");
    }
    prev = f;
    const double main_deg = beam_direction(design, f);
    trajectory.emplace_back(main_deg,
                            split_angles(design.config, main_deg, f));
  }
  return trajectory;
}

// ---------------------------------------------------------------------------
// Closed-form chain response (exact geometric series)
// ---------------------------------------------------------------------------

// a(Theta(f))^T g(f) = sum_m exp(j 2 pi m x) with
//   x = phi - f*ttd_slope - (P/2) sin(theta) (1 + f/f_c).
// The sum depends on x only mod 1 (m is an integer), so x is reduced to
// (-0.5, 0.5] and evaluated as exp(j pi x (M-1)) sin(pi M x)/sin(pi x).
// This is exact and O(1) per evaluation; feedback simulation over large N
// and the CLI beam-pattern tabulation rely on it. Unit tests pin it against
// the explicit steering_vector/frontend_response inner product.
inline cdouble chain_response(const FrontendDesign& design, double aod_deg,
                              double freq_hz) {
  detail::check_angle_freq(design.config, aod_deg, freq_hz);
  const double theta = normalized_aod(design.config, aod_deg)
                           .theta(freq_hz, design.config.carrier_hz);
  const double x_raw = design.ps_phase - freq_hz * design.ttd_slope - theta;
  const double x = x_raw - std::round(x_raw);
  const double m_count = static_cast<double>(design.config.antenna_count);
  const cdouble phase = detail::unit_phase(x * (m_count - 1.0) / 2.0);
  if (std::abs(x) < 1e-12) {
    return m_count * phase;
  }
  return phase * (std::sin(kPi * m_count * x) / std::sin(kPi * x));
}

inline double chain_gain(const FrontendDesign& design, double aod_deg,
                         double freq_hz) {
  return std::abs(chain_response(design, aod_deg, freq_hz));
}

}  // namespace squintsense
