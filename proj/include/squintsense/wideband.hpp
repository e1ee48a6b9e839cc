#pragma once

// Frequency-domain wideband channel and array-gain primitives for a uniform
// linear array (ULA) under the beam squint regime.
//
// Geometry and units:
//   - M antennas with inter-antenna spacing d = P * lambda_c / 2, where
//     lambda_c = c / f_c is the carrier wavelength and P the spacing ratio.
//   - Subcarrier frequencies are baseband offsets f in [0, F] on top of f_c.
//   - The normalized angle-of-departure is psi = (d/lambda_c) sin(theta)
//     = (P/2) sin(theta); the effective phase progression at offset f is
//     Theta(f) = psi * (1 + f/f_c), which is what makes the beam direction
//     frequency dependent (beam squint).

#include <cstddef>
#include <string>

#include "common.hpp"

namespace squintsense {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct SystemConfig {
  std::size_t antenna_count = 128;    // M
  double spacing_ratio = 1.0;         // P, with d = P * lambda_c / 2
  double carrier_hz = 30e9;           // f_c
  double bandwidth_hz = 6e9;          // F
  std::size_t subcarrier_count = 1024;  // N
  std::size_t rf_chains = 1;          // K (= users served per OFDM block)

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double spacing() const { return spacing_ratio * wavelength() / 2.0; }

  void validate() const {
    if (antenna_count < 2) {
      throw std::invalid_argument("SystemConfig: antenna_count must be >= 2");
    }
    if (!(spacing_ratio > 0.0)) {
      throw std::invalid_argument("SystemConfig: spacing_ratio must be > 0");
    }
    if (!(carrier_hz > 0.0)) {
      throw std::invalid_argument("SystemConfig: carrier_hz must be > 0");
    }
    if (!(bandwidth_hz > 0.0) || !(bandwidth_hz < carrier_hz)) {
      throw std::invalid_argument(
          "SystemConfig: bandwidth_hz must satisfy 0 < F < f_c");
    }
    if (subcarrier_count < 2) {
      throw std::invalid_argument(
          "SystemConfig: subcarrier_count must be >= 2");
    }
    if (rf_chains < 1) {
      throw std::invalid_argument("SystemConfig: rf_chains must be >= 1");
    }
  }
};

struct UserTruth {
  double aod_deg = 0.0;    // true angle of departure, degrees in (-90, 90)
  cdouble gain{1.0, 0.0};  // equivalent baseband complex gain beta
  double delay_s = 0.0;    // first-path propagation delay tau, seconds

  void validate() const {
    if (!(aod_deg > -90.0) || !(aod_deg < 90.0)) {
      throw std::invalid_argument("UserTruth: aod_deg must be in (-90, 90)");
    }
    if (gain == cdouble{0.0, 0.0}) {
      throw std::invalid_argument("UserTruth: gain must be nonzero");
    }
    if (delay_s < 0.0) {
      throw std::invalid_argument("UserTruth: delay_s must be >= 0");
    }
  }
};

struct NormalizedAoD {
  double psi = 0.0;  // (P/2) sin(theta), dimensionless

  // Effective phase progression at baseband offset f.
  double theta(double freq_hz, double carrier_hz) const {
    return psi * (1.0 + freq_hz / carrier_hz);
  }
};

inline NormalizedAoD normalized_aod(const SystemConfig& config,
                                    double aod_deg) {
  return NormalizedAoD{config.spacing_ratio / 2.0 * sin_deg(aod_deg)};
}

// Sequence of M unit-modulus entries exp(-j 2 pi (m-1) Theta(f)).
using SteeringVector = cvector;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

namespace detail {

inline void check_angle_freq(const SystemConfig& config, double aod_deg,
                             double freq_hz) {
  if (!(aod_deg > -90.0) || !(aod_deg < 90.0)) {
    throw std::domain_error("aod_deg " + std::to_string(aod_deg) +
                            " outside (-90, 90)");
  }
  if (freq_hz < 0.0 || freq_hz > config.bandwidth_hz) {
    throw std::domain_error("freq_hz " + std::to_string(freq_hz) +
                            " outside [0, F]");
  }
}

inline cdouble unit_phase(double cycles) {
  const double a = 2.0 * kPi * cycles;
  return {std::cos(a), std::sin(a)};
}

}  // namespace detail

// a(Theta(f)): entry m = exp(-j 2 pi (m-1) Theta(f)).
inline SteeringVector steering_vector(const SystemConfig& config,
                                      double aod_deg, double freq_hz) {
  detail::check_angle_freq(config, aod_deg, freq_hz);
  const double theta =
      normalized_aod(config, aod_deg).theta(freq_hz, config.carrier_hz);
  SteeringVector a(config.antenna_count);
  for (std::size_t m = 0; m < config.antenna_count; ++m) {
    a[m] = detail::unit_phase(-theta * static_cast<double>(m));
  }
  return a;
}

// h(f) = beta * exp(-j 2 pi f tau) * a(Theta(f)).
inline cvector channel_response(const SystemConfig& config,
                                const UserTruth& user, double freq_hz) {
  user.validate();
  cvector h = steering_vector(config, user.aod_deg, freq_hz);
  const cdouble scale =
      user.gain * detail::unit_phase(-freq_hz * user.delay_s);
  for (cdouble& entry : h) {
    entry *= scale;
  }
  return h;
}

// y = channel^T * tx + noise (plain transpose, no conjugation).
inline cdouble received_symbol(const cvector& channel, const cvector& tx,
                               cdouble noise) {
  if (channel.size() != tx.size()) {
    throw std::invalid_argument("received_symbol: length mismatch");
  }
  cdouble acc{0.0, 0.0};
  for (std::size_t m = 0; m < channel.size(); ++m) {
    acc += channel[m] * tx[m];
  }
  return acc + noise;
}

// |a(Theta(f))^T * weights|; at most M when all weight moduli are <= 1.
inline double array_gain(const SystemConfig& config, double aod_deg,
                         double freq_hz, const cvector& weights) {
  if (weights.size() != config.antenna_count) {
    throw std::invalid_argument("array_gain: weights length mismatch");
  }
  const SteeringVector a = steering_vector(config, aod_deg, freq_hz);
  return std::abs(received_symbol(a, weights, cdouble{0.0, 0.0}));
}

// The normalized AoD whose gain against a frequency-flat PS setting phi is
// maximal at offset f: psi = phi / (1 + f/f_c).
inline NormalizedAoD squint_matched_aod(double phi, double freq_hz,
                                        const SystemConfig& config) {
  if (freq_hz < 0.0) {
    throw std::domain_error("squint_matched_aod: freq_hz must be >= 0");
  }
  return NormalizedAoD{phi / (1.0 + freq_hz / config.carrier_hz)};
}

// Total squint excursion across the band: psi(0) - psi(F) = phi F/(f_c + F).
inline double squint_range(double phi, const SystemConfig& config) {
  return phi * config.bandwidth_hz / (config.carrier_hz + config.bandwidth_hz);
}

}  // namespace squintsense
