#pragma once

// The two frequency-domain direction-sensing procedures:
//
//   sense_squint       -- one OFDM block. The TTD frontend sweeps the beam
//                         across [theta_0, theta_c] as subcarrier frequency
//                         rises; the user feeds back the subcarrier index of
//                         maximum received power; inverting the sweep map
//                         yields the direction. Requires P = 1 so that the
//                         reported direction is unambiguous.
//   sense_squint_split -- two OFDM blocks, P > 1. Each subcarrier radiates a
//                         main beam plus grating aliases, multiplying the
//                         covered range; the feedback identifies a finite
//                         candidate set (main + aliases). A second pass with
//                         a shifted initial angle (same TTD slope) produces a
//                         second candidate set whose intersection isolates
//                         the true direction.

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "frontend.hpp"

namespace squintsense {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct SubcarrierGrid {
  std::vector<double> frequencies;  // f_n = n F / N, n = 0..N-1
};

inline SubcarrierGrid subcarrier_grid(const SystemConfig& config) {
  config.validate();
  SubcarrierGrid grid;
  grid.frequencies.resize(config.subcarrier_count);
  for (std::size_t n = 0; n < config.subcarrier_count; ++n) {
    grid.frequencies[n] = static_cast<double>(n) * config.bandwidth_hz /
                          static_cast<double>(config.subcarrier_count);
  }
  return grid;
}

struct FeedbackReport {
  std::size_t subcarrier_index = 0;  // argmax of received power
  double freq_hz = 0.0;              // grid frequency at that index
  double peak_power = 0.0;           // |r_n|^2 at the argmax
  bool covered = false;              // false: no subcarrier passed coverage
};

struct CandidateSet {
  double main_deg = 0.0;
  std::vector<double> aliases_deg;

  std::vector<double> all() const {
    std::vector<double> out;
    out.reserve(1 + aliases_deg.size());
    out.push_back(main_deg);
    out.insert(out.end(), aliases_deg.begin(), aliases_deg.end());
    return out;
  }
};

struct SensingRangeSet {
  std::pair<double, double> main{0.0, 0.0};  // (theta_0, theta_c), degrees
  // Per feasible grating branch: directions at the start and end of the
  // branch's feasible frequency window (clipped where |sin| would exceed 1).
  std::vector<std::pair<double, double>> splits;
  std::vector<int> split_z;  // grating order per splits entry
  bool overlap_free = true;
};

struct NoiseModel {
  double variance = 0.0;       // total variance of the circular CN noise
  std::uint64_t rng_seed = 0;  // stream seed for this sensing pass/trial
};

// ---------------------------------------------------------------------------
// Feedback simulation
// ---------------------------------------------------------------------------

// Received sample per subcarrier: r_n = beta exp(-j 2 pi f_n tau)
// a(Theta(f_n))^T g(f_n) + nu_n; reports the power-argmax index (ties go to
// the lowest index). Coverage test: max |r_n|^2 >= gamma (M |beta|)^2 with
// gamma = 0.5, i.e. within 3 dB of the noiseless peak.
inline FeedbackReport simulate_feedback(const FrontendDesign& design,
                                        const UserTruth& user,
                                        const SubcarrierGrid& grid,
                                        const NoiseModel& noise) {
  user.validate();
  const std::size_t n_count = grid.frequencies.size();
  if (n_count != design.config.subcarrier_count || n_count < 2 ||
      grid.frequencies.front() != 0.0 ||
      grid.frequencies.back() > design.config.bandwidth_hz) {
    throw std::invalid_argument(
        "simulate_feedback: grid does not match design config");
  }
  if (noise.variance < 0.0) {
    throw std::invalid_argument("simulate_feedback: negative noise variance");
  }

  std::mt19937_64 rng(noise.rng_seed);
  std::normal_distribution<double> component(0.0,
                                             std::sqrt(noise.variance / 2.0));
  const bool noisy = noise.variance > 0.0;

  FeedbackReport report;
  double best_power = -1.0;
  for (std::size_t n = 0; n < n_count; ++n) {
    const double f = grid.frequencies[n];
    cdouble r = user.gain * detail::unit_phase(-f * user.delay_s) *
                chain_response(design, user.aod_deg, f);
    if (noisy) {
      r += cdouble{component(rng), component(rng)};
    }
    const double power = std::norm(r);
    if (power > best_power) {
      best_power = power;
      report.subcarrier_index = n;
      report.freq_hz = f;
    }
  }
  report.peak_power = best_power;
  const double peak = static_cast<double>(design.config.antenna_count) *
                      std::abs(user.gain);
  report.covered = best_power >= kCoverageGamma * peak * peak;
  return report;
}

// ---------------------------------------------------------------------------
// Squint-only sensing (one block)
// ---------------------------------------------------------------------------

inline double sense_squint(const FrontendDesign& design,
                           const FeedbackReport& report) {
  if (std::abs(design.config.spacing_ratio - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "sense_squint: requires half-wavelength spacing (P = 1)");
  }
  if (!report.covered) {
    throw not_in_range_error(
        "sense_squint: user is not located in the sensing range");
  }
  return beam_direction(design, report.freq_hz);
}

// ---------------------------------------------------------------------------
// Split-range bookkeeping
// ---------------------------------------------------------------------------

namespace detail {

// The grating branch of order z follows
//   sin(theta^s_z(f)) = (a - b f) / (1 + f/f_c),
// with a = sin(theta_0) - 2z/P and b = (2/P) ttd_slope, monotone in f. The
// feasible window is where it stays inside [-1, 1]; crossings solve
//   a - b f = s (1 + f/f_c)  =>  f = (a - s) / (b + s/f_c).
struct BranchWindow {
  double f_lo = 0.0;
  double f_hi = 0.0;
  double sin_lo = 0.0;  // branch value at f_lo
  double sin_hi = 0.0;  // branch value at f_hi
};

inline std::optional<BranchWindow> branch_window(const FrontendDesign& design,
                                                 int z) {
  const double band = design.config.bandwidth_hz;
  const double v0 = alias_sin(design, z, 0.0);
  const double v_f = alias_sin(design, z, band);
  if ((v0 > 1.0 && v_f > 1.0) || (v0 < -1.0 && v_f < -1.0)) {
    return std::nullopt;  // never enters [-1, 1] (monotone branch)
  }
  const double a = sin_deg(design.theta0_deg) -
                   2.0 * static_cast<double>(z) / design.config.spacing_ratio;
  const double b = 2.0 / design.config.spacing_ratio * design.ttd_slope;
  const auto crossing = [&](double s) {
    return (a - s) / (b + s / design.config.carrier_hz);
  };
  BranchWindow w{0.0, band, v0, v_f};
  if (v0 > 1.0) {
    w.f_lo = crossing(1.0);
    w.sin_lo = 1.0;
  } else if (v0 < -1.0) {
    w.f_lo = crossing(-1.0);
    w.sin_lo = -1.0;
  }
  if (v_f > 1.0) {
    w.f_hi = crossing(1.0);
    w.sin_hi = 1.0;
  } else if (v_f < -1.0) {
    w.f_hi = crossing(-1.0);
    w.sin_hi = -1.0;
  }
  if (!(w.f_lo < w.f_hi)) {
    return std::nullopt;
  }
  return w;
}

}  // namespace detail

// Tracks every grating branch over f in [0, F] and reports the angular
// interval each one sweeps, plus whether the main range and all branch
// ranges are pairwise disjoint in the sin domain (required for the split
// method: overlapping pieces would make feedback ambiguous within a pass).
inline SensingRangeSet split_sensing_ranges(const FrontendDesign& design) {
  SensingRangeSet set;
  set.main = {design.theta0_deg, design.thetac_deg};

  std::vector<std::pair<double, double>> sin_intervals;
  const double s0 = sin_deg(design.theta0_deg);
  const double sc = sin_deg(design.thetac_deg);
  sin_intervals.emplace_back(std::min(s0, sc), std::max(s0, sc));

  const int z_bound = detail::alias_order_bound(design.config);
  for (int z = -z_bound; z <= z_bound; ++z) {
    if (z == 0) {
      continue;
    }
    const auto window = detail::branch_window(design, z);
    if (!window) {
      continue;
    }
    set.splits.emplace_back(asin_deg(window->sin_lo),
                            asin_deg(window->sin_hi));
    set.split_z.push_back(z);
    sin_intervals.emplace_back(std::min(window->sin_lo, window->sin_hi),
                               std::max(window->sin_lo, window->sin_hi));
  }

  std::sort(sin_intervals.begin(), sin_intervals.end());
  set.overlap_free = true;
  for (std::size_t i = 0; i + 1 < sin_intervals.size(); ++i) {
    if (sin_intervals[i + 1].first < sin_intervals[i].second - 1e-12) {
      set.overlap_free = false;
      break;
    }
  }
  return set;
}

// The finite set of directions a covered feedback is compatible with: the
// main beam direction at the reported subcarrier plus all its aliases there.
inline CandidateSet candidate_angles(const FrontendDesign& design,
                                     const FeedbackReport& report) {
  if (!report.covered) {
    throw not_in_range_error(
        "candidate_angles: user is not located in the sensing range");
  }
  CandidateSet set;
  set.main_deg = beam_direction(design, report.freq_hz);
  set.aliases_deg =
      split_angles(design.config, set.main_deg, report.freq_hz).aliases_deg;
  return set;
}

// ---------------------------------------------------------------------------
// Ambiguity condition and validation-angle selection
// ---------------------------------------------------------------------------

// True when re-sensing with initial angle theta0_tilde cannot disambiguate
// grating order z: the condition compares
//   [sin(t~0) + T] / [sin(t0) + T]  vs  [sin(t~0) - sin(t~0^s)] / [sin(t0) - sin(t0^s)]
// with T = f_c (2/P) ttd_slope and the ^s values taken on branch Z = z at
// f = 0. Evaluated cross-multiplied (relative tolerance 1e-9) to avoid
// division blow-ups. If branch z is infeasible for either angle there is no
// alias to confuse, so the condition is vacuously false.
inline bool ambiguity_condition(const FrontendDesign& design,
                                double theta0_deg, double theta0_tilde_deg,
                                int z) {
  if (z == 0) {
    throw std::invalid_argument("ambiguity_condition: z must be nonzero");
  }
  if (!(theta0_deg > -90.0) || !(theta0_deg < 90.0) ||
      !(theta0_tilde_deg > -90.0) || !(theta0_tilde_deg < 90.0)) {
    throw std::invalid_argument(
        "ambiguity_condition: angles must be in (-90, 90)");
  }
  const double shift = 2.0 * static_cast<double>(z) /
                       design.config.spacing_ratio;  // alias shift at f = 0
  const double s0 = sin_deg(theta0_deg);
  const double st = sin_deg(theta0_tilde_deg);
  if (std::abs(s0 - shift) > 1.0 || std::abs(st - shift) > 1.0) {
    return false;  // branch z radiates for neither angle
  }
  const double t = design.config.carrier_hz * 2.0 /
                   design.config.spacing_ratio * design.ttd_slope;
  // lhs = (st + t)/(s0 + t), rhs = shift/shift; cross-multiplied:
  const double lhs_num = (st + t) * shift;
  const double rhs_num = (s0 + t) * shift;
  const double scale =
      std::max({1.0, std::abs(lhs_num), std::abs(rhs_num)});
  return std::abs(lhs_num - rhs_num) <= 1e-9 * scale;
}

namespace detail {

inline FrontendDesign shifted_design(const FrontendDesign& design,
                                     double theta0_sin) {
  const double band = design.config.bandwidth_hz;
  const double thetac_sin =
      (theta0_sin - band * 2.0 / design.config.spacing_ratio *
                        design.ttd_slope) /
      (1.0 + band / design.config.carrier_hz);
  FrontendDesign shifted = design;
  shifted.theta0_deg = asin_deg(theta0_sin);
  shifted.thetac_deg = asin_deg(thetac_sin);
  shifted.ps_phase = design.config.spacing_ratio / 2.0 * theta0_sin;
  // ttd_slope deliberately unchanged: only the PS setting moves.
  return shifted;
}

// Core of select_validation_angle, returning the whole design so callers do
// not rebuild it through lossy degree round-trips.
inline FrontendDesign select_validation_design(
    const FrontendDesign& design, const std::vector<double>& hints_deg) {
  if (design.ttd_slope == 0.0) {
    throw std::invalid_argument(
        "select_validation_angle: zero TTD slope, no sweep to validate with");
  }
  const double s0 = sin_deg(design.theta0_deg);
  const int z_bound = alias_order_bound(design.config);
  // Shift enumeration order is a fixed convention: +-2, +-4, ..., +-20
  // degrees, applied in the sin domain.
  for (int step = 1; step <= 10; ++step) {
    for (int sign : {+1, -1}) {
      const double delta_deg = static_cast<double>(sign) *
                               static_cast<double>(2 * step);
      const double st0 = s0 + sin_deg(delta_deg);
      if (!(std::abs(st0) < 1.0)) {
        continue;
      }
      FrontendDesign trial = shifted_design(design, st0);
      if (!(std::abs(sin_deg(trial.thetac_deg)) <= 1.0) ||
          sin_deg(trial.theta0_deg) == sin_deg(trial.thetac_deg)) {
        continue;
      }
      // (a) the shift must break the ambiguity for every grating order.
      bool ambiguous = false;
      for (int z = -z_bound; z <= z_bound && !ambiguous; ++z) {
        if (z != 0 &&
            ambiguity_condition(design, design.theta0_deg, trial.theta0_deg,
                                z)) {
          ambiguous = true;
        }
      }
      if (ambiguous) {
        continue;
      }
      // (b) every previously reported candidate must still be covered by the
      // shifted main-or-alias ranges, otherwise the true user might receive
      // no beam in the validation pass.
      const SensingRangeSet ranges = split_sensing_ranges(trial);
      std::vector<std::pair<double, double>> sin_pieces;
      sin_pieces.emplace_back(
          std::min(sin_deg(ranges.main.first), sin_deg(ranges.main.second)),
          std::max(sin_deg(ranges.main.first), sin_deg(ranges.main.second)));
      for (const auto& piece : ranges.splits) {
        sin_pieces.emplace_back(
            std::min(sin_deg(piece.first), sin_deg(piece.second)),
            std::max(sin_deg(piece.first), sin_deg(piece.second)));
      }
      bool all_covered = true;
      for (double hint : hints_deg) {
        const double hs = sin_deg(hint);
        bool inside = false;
        for (const auto& piece : sin_pieces) {
          if (hs >= piece.first - 1e-12 && hs <= piece.second + 1e-12) {
            inside = true;
            break;
          }
        }
        if (!inside) {
          all_covered = false;
          break;
        }
      }
      if (!all_covered) {
        continue;
      }
      // (c) the shifted ranges must stay overlap-free.
      if (!ranges.overlap_free) {
        continue;
      }
      return trial;
    }
  }
  throw validation_unavailable_error(
      "select_validation_angle: no shift in +-{2..20} degrees yields an "
      "unambiguous, covering, overlap-free validation design");
}

}  // namespace detail

// Picks the validation initial angle theta~_0 (and the implied theta~_c,
// same TTD slope) for the second sensing pass. hints_deg is the candidate
// set reported by the first pass.
inline std::pair<double, double> select_validation_angle(
    const FrontendDesign& design, const std::vector<double>& hints_deg) {
  const FrontendDesign trial =
      detail::select_validation_design(design, hints_deg);
  return {trial.theta0_deg, trial.thetac_deg};
}

// Convenience overload matching a (lo, hi) hint bracket.
inline std::pair<double, double> select_validation_angle(
    const FrontendDesign& design, std::pair<double, double> hint_range_deg) {
  return select_validation_angle(
      design,
      std::vector<double>{hint_range_deg.first, hint_range_deg.second});
}

// ---------------------------------------------------------------------------
// Candidate intersection
// ---------------------------------------------------------------------------

// Default matching tolerance for intersection_validate: the sum of each
// pass's maximum per-subcarrier sin-domain grid spacing, taken over the main
// trajectory AND every feasible grating branch. Rationale: a candidate from
// a covered user is quantized to its pass's direction grid with error up to
// half a local step in the interior, but up to a FULL step next to a
// trajectory endpoint (the last grid point sits one step short of the
// continuous endpoint, so endpoint users quantize one-sided); alias-branch
// grids are coarser than the main grid by 2Z/(P f_c (1+f/f_c)^2) df. The
// worst matched pair therefore differs by at most smax(pass1) + smax(pass2).
// Cross-candidate separations are piece-scale (orders of magnitude larger),
// so this tolerance cannot introduce ambiguity.
inline double default_intersection_tol(const FrontendDesign& first,
                                       const FrontendDesign& second,
                                       const SubcarrierGrid& grid) {
  const auto max_spacing = [&grid](const FrontendDesign& design) {
    const int z_bound = detail::alias_order_bound(design.config);
    double smax = 0.0;
    for (int z = -z_bound; z <= z_bound; ++z) {
      bool have_prev = false;
      double prev = 0.0;
      for (double f : grid.frequencies) {
        const double v = (z == 0) ? detail::beam_sin(design, f)
                                  : detail::alias_sin(design, z, f);
        if (v >= -1.0 && v <= 1.0) {
          if (have_prev) {
            smax = std::max(smax, std::abs(v - prev));
          }
          prev = v;
          have_prev = true;
        } else {
          have_prev = false;
        }
      }
    }
    return smax;
  };
  return max_spacing(first) + max_spacing(second);
}

// Returns the midpoint (in the sin domain) of the minimal-gap candidate pair
// matching within tol_sin. tol_sin is a sin-domain quantity (candidates from
// the two passes are quantized to different grids and never match exactly).
// Ambiguity means two *disjoint* matching pairs -- two pairs that share a
// candidate still identify a single direction, so the closer pair wins.
inline double intersection_validate(const CandidateSet& first,
                                    const CandidateSet& second,
                                    double tol_sin) {
  if (!(tol_sin >= 0.0)) {
    throw std::invalid_argument("intersection_validate: negative tolerance");
  }
  const std::vector<double> xs = first.all();
  const std::vector<double> ys = second.all();
  std::size_t matches = 0;
  double best_gap = 0.0;
  double best_mid_sin = 0.0;
  std::vector<bool> x_used(xs.size(), false);
  std::vector<bool> y_used(ys.size(), false);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double sx = sin_deg(xs[i]);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double sy = sin_deg(ys[j]);
      const double gap = std::abs(sx - sy);
      if (gap <= tol_sin) {
        if (matches == 0 || gap < best_gap) {
          best_gap = gap;
          best_mid_sin = (sx + sy) / 2.0;
        }
        ++matches;
        x_used[i] = true;
        y_used[j] = true;
      }
    }
  }
  if (matches == 0) {
    throw no_intersection_error(
        "intersection_validate: no candidate pair within tolerance");
  }
  // Two disjoint pairs exist iff the matches span >= 2 distinct candidates
  // on both sides.
  const auto count_true = [](const std::vector<bool>& v) {
    std::size_t c = 0;
    for (bool b : v) {
      c += b ? 1 : 0;
    }
    return c;
  };
  if (count_true(x_used) >= 2 && count_true(y_used) >= 2) {
    throw ambiguous_intersection_error(
        "intersection_validate: multiple disjoint candidate pairs within "
        "tolerance");
  }
  return asin_deg(best_mid_sin);
}

// ---------------------------------------------------------------------------
// Full two-pass split sensing session
// ---------------------------------------------------------------------------

enum class SessionStatus {
  ok,
  not_in_range,            // user covered in neither pass (or only pass 1)
  validation_unavailable,  // no usable second design
  no_intersection,         // candidate sets did not intersect
  ambiguous,               // candidate sets intersected more than once
};

// Non-throwing record of one sense_squint_split run; the CLI and the
// Monte-Carlo harness need outcome + block count even on failure.
struct SplitSession {
  SessionStatus status = SessionStatus::not_in_range;
  FrontendDesign first_design;
  FrontendDesign second_design;
  FeedbackReport first_report;
  FeedbackReport second_report;
  CandidateSet first_candidates;
  CandidateSet second_candidates;
  double tol_sin = 0.0;
  double estimate_deg = 0.0;  // valid only when status == ok
  int blocks_used = 0;        // OFDM blocks actually transmitted
};

inline SplitSession run_split_session(const SystemConfig& config,
                                      double theta0_deg, double thetac_deg,
                                      const UserTruth& user,
                                      const SubcarrierGrid& grid,
                                      const NoiseModel& noise) {
  if (!(config.spacing_ratio > 1.0)) {
    throw std::invalid_argument(
        "run_split_session: split sensing requires P > 1");
  }
  SplitSession session;
  session.first_design = design_frontend(config, theta0_deg, thetac_deg);
  if (!split_sensing_ranges(session.first_design).overlap_free) {
    throw std::invalid_argument(
        "run_split_session: sensing ranges overlap; choose a narrower "
        "(theta_0, theta_c)");
  }

  const NoiseModel pass1{noise.variance,
                         derive_seed(noise.rng_seed, {1u})};
  session.first_report =
      simulate_feedback(session.first_design, user, grid, pass1);
  session.blocks_used = 1;
  if (!session.first_report.covered) {
    session.status = SessionStatus::not_in_range;
    return session;
  }
  session.first_candidates =
      candidate_angles(session.first_design, session.first_report);

  try {
    session.second_design = detail::select_validation_design(
        session.first_design, session.first_candidates.all());
  } catch (const validation_unavailable_error&) {
    session.status = SessionStatus::validation_unavailable;
    return session;
  }

  const NoiseModel pass2{noise.variance,
                         derive_seed(noise.rng_seed, {2u})};
  session.second_report =
      simulate_feedback(session.second_design, user, grid, pass2);
  session.blocks_used = 2;
  if (!session.second_report.covered) {
    session.status = SessionStatus::not_in_range;
    return session;
  }
  session.second_candidates =
      candidate_angles(session.second_design, session.second_report);

  session.tol_sin = default_intersection_tol(session.first_design,
                                             session.second_design, grid);
  try {
    session.estimate_deg =
        intersection_validate(session.first_candidates,
                              session.second_candidates, session.tol_sin);
  } catch (const no_intersection_error&) {
    session.status = SessionStatus::no_intersection;
    return session;
  } catch (const ambiguous_intersection_error&) {
    session.status = SessionStatus::ambiguous;
    return session;
  }
  session.status = SessionStatus::ok;
  return session;
}

// Throwing wrapper: returns the estimate or raises the session's failure.
inline double sense_squint_split(const SystemConfig& config,
                                 double theta0_deg, double thetac_deg,
                                 const UserTruth& user,
                                 const SubcarrierGrid& grid,
                                 const NoiseModel& noise) {
  const SplitSession session =
      run_split_session(config, theta0_deg, thetac_deg, user, grid, noise);
  switch (session.status) {
    case SessionStatus::ok:
      return session.estimate_deg;
    case SessionStatus::not_in_range:
      throw not_in_range_error(
          "sense_squint_split: user is located in no sensed range");
    case SessionStatus::validation_unavailable:
      throw validation_unavailable_error(
          "sense_squint_split: no validation design available");
    case SessionStatus::no_intersection:
      throw no_intersection_error(
          "sense_squint_split: candidate sets do not intersect");
    case SessionStatus::ambiguous:
    default:
      throw ambiguous_intersection_error(
          "sense_squint_split: candidate intersection is ambiguous");
  }
}

}  // namespace squintsense
