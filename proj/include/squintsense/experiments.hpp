#pragma once

// Monte-Carlo harness: RMSE of the sensing methods versus SNR, N, and M over
// randomized user draws, plus time-overhead accounting and CSV output.
//
// Determinism contract: every random draw comes from an RNG stream derived
// from (seed, trial, user, purpose[, pass]) -- never from the (SNR, N, M)
// grid-point index and never from execution order. All grid points therefore
// see the same user angles/gains (common random numbers, which makes the
// monotone-trend comparisons well conditioned), and parallel execution is
// bit-identical to serial.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sensing.hpp"

namespace squintsense {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Method { squint_only, squint_split };

// Accounting policy for users that end a trial without an estimate.
enum class UncoveredPolicy {
  exclude,   // drop from RMSE, report via coverage_rate (default)
  midpoint,  // substitute the sensing-range midpoint as the estimate
};

struct ScenarioConfig {
  SystemConfig base;
  Method method = Method::squint_only;
  std::pair<double, double> aod_range_deg{-80.0, 80.0};      // user draws
  std::pair<double, double> sensing_range_deg{-80.0, 80.0};  // (theta_0, theta_c)
  std::vector<double> snr_db_list;
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> m_list;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  UncoveredPolicy uncovered_policy = UncoveredPolicy::exclude;

  void validate() const {
    base.validate();
    if (!(aod_range_deg.first > -90.0) || !(aod_range_deg.second < 90.0) ||
        !(aod_range_deg.first <= aod_range_deg.second)) {
      throw std::invalid_argument(
          "ScenarioConfig: aod_range_deg must be an interval inside "
          "(-90, 90)");
    }
    if (!(sensing_range_deg.first > -90.0) ||
        !(sensing_range_deg.first < 90.0) ||
        !(sensing_range_deg.second > -90.0) ||
        !(sensing_range_deg.second < 90.0)) {
      throw std::invalid_argument(
          "ScenarioConfig: sensing_range_deg must lie inside (-90, 90)");
    }
    if (snr_db_list.empty() || n_list.empty() || m_list.empty()) {
      throw std::invalid_argument(
          "ScenarioConfig: snr_db_list, n_list, m_list must be nonempty");
    }
    for (std::size_t n : n_list) {
      if (n < 2) {
        throw std::invalid_argument("ScenarioConfig: n_list entries >= 2");
      }
    }
    for (std::size_t m : m_list) {
      if (m < 2) {
        throw std::invalid_argument("ScenarioConfig: m_list entries >= 2");
      }
    }
    if (trials < 1) {
      throw std::invalid_argument("ScenarioConfig: trials must be >= 1");
    }
    if (method == Method::squint_split && !(base.spacing_ratio > 1.0)) {
      throw std::invalid_argument(
          "ScenarioConfig: squint_split requires spacing_ratio P > 1");
    }
    if (method == Method::squint_only &&
        std::abs(base.spacing_ratio - 1.0) > 1e-12) {
      throw std::invalid_argument(
          "ScenarioConfig: squint_only requires spacing_ratio P = 1");
    }
  }
};

struct TrialResult {
  double truth_deg = 0.0;
  double estimate_deg = 0.0;
  bool covered = false;
  int blocks_used = 0;
};

struct RMSEStat {
  double snr_db = 0.0;
  std::size_t subcarriers = 0;  // N at this grid point
  std::size_t antennas = 0;     // M at this grid point
  double rmse_deg = 0.0;
  double coverage_rate = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// sigma^2 = ||a||^2 / 10^(SNR/10) = M / 10^(SNR/10).
inline double snr_to_noise(const SystemConfig& config, double snr_db) {
  return static_cast<double>(config.antenna_count) /
         std::pow(10.0, snr_db / 10.0);
}

// sqrt( mean over trials of mean-square angular error of that trial's users ).
// results must be trial-major: index = trial * users_per_trial + user.
// Uncovered users are excluded (default) or included with their substituted
// estimates (midpoint policy); trials with no usable user are skipped.
inline RMSEStat rmse(const std::vector<TrialResult>& results,
                     std::size_t users_per_trial,
                     UncoveredPolicy policy = UncoveredPolicy::exclude) {
  if (users_per_trial < 1 || results.size() % users_per_trial != 0) {
    throw std::invalid_argument(
        "rmse: results size must be a multiple of users_per_trial");
  }
  if (results.empty()) {
    throw undefined_statistic_error("rmse: empty result set");
  }
  const std::size_t trial_count = results.size() / users_per_trial;
  double sum_trial_means = 0.0;
  std::size_t used_trials = 0;
  std::size_t covered_count = 0;
  for (std::size_t t = 0; t < trial_count; ++t) {
    double sum_sq = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < users_per_trial; ++k) {
      const TrialResult& r = results[t * users_per_trial + k];
      if (r.covered) {
        ++covered_count;
      }
      if (r.covered || policy == UncoveredPolicy::midpoint) {
        const double err = r.estimate_deg - r.truth_deg;
        sum_sq += err * err;
        ++used;
      }
    }
    if (used > 0) {
      sum_trial_means += sum_sq / static_cast<double>(used);
      ++used_trials;
    }
  }
  if (used_trials == 0) {
    throw undefined_statistic_error(
        "rmse: no covered user in any trial");
  }
  RMSEStat stat;
  stat.rmse_deg =
      std::sqrt(sum_trial_means / static_cast<double>(used_trials));
  stat.coverage_rate =
      static_cast<double>(covered_count) / static_cast<double>(results.size());
  return stat;
}

namespace detail {

inline double uniform_in(std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

// One (trial, user) sensing run at a given grid point.
inline TrialResult run_one(const ScenarioConfig& sc, const SystemConfig& pt,
                           const FrontendDesign& squint_design,
                           const SubcarrierGrid& grid, double sigma2,
                           std::size_t trial, std::size_t user_idx) {
  TrialResult result;
  result.truth_deg = detail::uniform_in(
      derive_seed(sc.seed, {trial, user_idx, 0u}), sc.aod_range_deg.first,
      sc.aod_range_deg.second);
  UserTruth user;
  user.aod_deg = result.truth_deg;
  const double beta_phase = detail::uniform_in(
      derive_seed(sc.seed, {trial, user_idx, 1u}), 0.0, 2.0 * kPi);
  user.gain = detail::unit_phase(beta_phase / (2.0 * kPi));
  const NoiseModel noise{sigma2, derive_seed(sc.seed, {trial, user_idx, 2u})};

  if (sc.method == Method::squint_only) {
    const FeedbackReport report =
        simulate_feedback(squint_design, user, grid, noise);
    result.blocks_used = 1;
    result.covered = report.covered;
    if (report.covered) {
      result.estimate_deg = sense_squint(squint_design, report);
    }
  } else {
    const SplitSession session =
        run_split_session(pt, sc.sensing_range_deg.first,
                          sc.sensing_range_deg.second, user, grid, noise);
    result.blocks_used = session.blocks_used;
    result.covered = session.status == SessionStatus::ok;
    if (result.covered) {
      result.estimate_deg = session.estimate_deg;
    }
  }
  if (!result.covered && sc.uncovered_policy == UncoveredPolicy::midpoint) {
    result.estimate_deg =
        (sc.sensing_range_deg.first + sc.sensing_range_deg.second) / 2.0;
  }
  return result;
}

}  // namespace detail

// Runs `trials` independent trials of K = rf_chains users for every
// (M, N, SNR) grid point; row order is m_list x n_list x snr_db_list in
// config order. Grid points with no usable trial get rmse_deg = NaN.
inline std::vector<RMSEStat> run_scenario(
    const ScenarioConfig& sc,
    const std::function<void(const RMSEStat&)>& progress = {}) {
  sc.validate();
  const std::size_t users = sc.base.rf_chains;
  std::vector<RMSEStat> table;
  table.reserve(sc.m_list.size() * sc.n_list.size() * sc.snr_db_list.size());

  for (std::size_t m : sc.m_list) {
    for (std::size_t n : sc.n_list) {
      SystemConfig pt = sc.base;
      pt.antenna_count = m;
      pt.subcarrier_count = n;
      pt.validate();
      const SubcarrierGrid grid = subcarrier_grid(pt);
      const FrontendDesign squint_design =
          design_frontend(pt, sc.sensing_range_deg.first,
                          sc.sensing_range_deg.second);
      for (double snr_db : sc.snr_db_list) {
        const double sigma2 = snr_to_noise(pt, snr_db);
        std::vector<TrialResult> results(sc.trials * users);

        const auto run_block = [&](std::size_t t_begin, std::size_t t_end) {
          for (std::size_t t = t_begin; t < t_end; ++t) {
            for (std::size_t k = 0; k < users; ++k) {
              results[t * users + k] = detail::run_one(
                  sc, pt, squint_design, grid, sigma2, t, k);
            }
          }
        };
        const std::size_t hw = std::thread::hardware_concurrency();
        const std::size_t workers =
            std::min<std::size_t>(hw == 0 ? 1 : hw, sc.trials);
        if (workers <= 1) {
          run_block(0, sc.trials);
        } else {
          std::vector<std::thread> pool;
          pool.reserve(workers);
          const std::size_t chunk = (sc.trials + workers - 1) / workers;
          for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t t_begin = w * chunk;
            const std::size_t t_end = std::min(t_begin + chunk, sc.trials);
            if (t_begin < t_end) {
              pool.emplace_back(run_block, t_begin, t_end);
            }
          }
          for (std::thread& worker : pool) {
            worker.join();
          }
        }

        RMSEStat stat;
        try {
          stat = rmse(results, users, sc.uncovered_policy);
        } catch (const undefined_statistic_error&) {
          stat.rmse_deg = std::numeric_limits<double>::quiet_NaN();
          stat.coverage_rate = 0.0;
        }
        stat.snr_db = snr_db;
        stat.subcarriers = n;
        stat.antennas = m;
        if (progress) {
          progress(stat);
        }
        table.push_back(stat);
      }
    }
  }
  return table;
}

// OFDM-block cost of covering a sensing range once.
enum class Scheme { squint_only, squint_split, exhaustive_sweep };

inline std::size_t time_overhead(Scheme scheme, std::size_t q_directions = 1) {
  switch (scheme) {
    case Scheme::squint_only:
      return 1;
    case Scheme::squint_split:
      return 2;
    case Scheme::exhaustive_sweep:
    default:
      if (q_directions < 1) {
        throw std::invalid_argument(
            "time_overhead: exhaustive sweep needs q_directions >= 1");
      }
      return q_directions;
  }
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline const char* method_name(Method method) {
  return method == Method::squint_only ? "squint" : "squint-split";
}

inline void emit_results(const ScenarioConfig& sc,
                         const std::vector<RMSEStat>& table,
                         std::ostream& out) {
  out << "method,M,N,P,snr_db,aod_lo,aod_hi,range_lo,range_hi,trials,"
         "rmse_deg,coverage_rate,blocks\n";
  const std::size_t blocks = time_overhead(sc.method == Method::squint_only
                                               ? Scheme::squint_only
                                               : Scheme::squint_split);
  char row[512];
  for (const RMSEStat& stat : table) {
    std::snprintf(row, sizeof(row),
                  "%s,%zu,%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%zu,%.12g,"
                  "%.12g,%zu\n",
                  method_name(sc.method), stat.antennas, stat.subcarriers,
                  sc.base.spacing_ratio, stat.snr_db, sc.aod_range_deg.first,
                  sc.aod_range_deg.second, sc.sensing_range_deg.first,
                  sc.sensing_range_deg.second, sc.trials, stat.rmse_deg,
                  stat.coverage_rate, blocks);
    out << row;
  }
  if (!out) {
    throw std::runtime_error("emit_results: write to stream failed");
  }
}

inline void emit_results(const ScenarioConfig& sc,
                         const std::vector<RMSEStat>& table,
                         const std::string& path) {
  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("emit_results: cannot open '" + path +
                             "' for writing");
  }
  emit_results(sc, table, static_cast<std::ostream&>(file));
  file.flush();
  if (!file) {
    throw std::runtime_error("emit_results: write to '" + path + "' failed");
  }
}

}  // namespace squintsense
