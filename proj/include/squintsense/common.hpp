#pragma once

// Shared constants, numeric helpers, RNG stream derivation, and the error
// types used across the squintsense library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace squintsense {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Coverage threshold: a user counts as covered when its best received power
// reaches this fraction of the noiseless peak M^2*|beta|^2 (-3 dB).
inline constexpr double kCoverageGamma = 0.5;

using cdouble = std::complex<double>;
using cvector = std::vector<cdouble>;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

// User reported no covered subcarrier: it is not inside the sensed range(s).
class not_in_range_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No candidate pair of the two sensing passes matched within tolerance.
class no_intersection_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two or more candidate pairs matched within tolerance.
class ambiguous_intersection_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No initial-angle shift produced a valid, non-ambiguous validation design.
class validation_unavailable_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A statistic (e.g. RMSE) was requested over an empty sample.
class undefined_statistic_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Angle helpers (degrees at the API boundary, sine values internally)
// ---------------------------------------------------------------------------

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }
inline double sin_deg(double deg) { return std::sin(deg_to_rad(deg)); }

// arcsin in degrees with a floating-point guard: inputs within 1e-12 outside
// [-1, 1] are clamped; larger violations are domain errors.
inline double asin_deg(double sine) {
  if (sine > 1.0 || sine < -1.0) {
    if (sine > 1.0 + 1e-12 || sine < -1.0 - 1e-12) {
      throw std::domain_error("asin_deg: argument " + std::to_string(sine) +
                              " outside [-1, 1]");
    }
    sine = (sine > 1.0) ? 1.0 : -1.0;
  }
  return rad_to_deg(std::asin(sine));
}

// ---------------------------------------------------------------------------
// Deterministic RNG stream derivation
// ---------------------------------------------------------------------------

// SplitMix64 finalizer; good avalanche for deriving independent seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives a child seed from a base seed and a list of stream labels
// (trial index, user index, purpose tag, pass index, ...). The derivation is
// order-sensitive and collision-resistant for practical label counts, so
// every (trial, user, purpose) combination gets an independent stream
// regardless of execution order -- the basis of the parallel == serial
// determinism contract.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = splitmix64(base ^ 0x5A17F00D5EEDull);
  for (std::uint64_t label : labels) {
    h = splitmix64(h ^ (label + 0x9E3779B97F4A7C15ull));
  }
  return h;
}

}  // namespace squintsense
