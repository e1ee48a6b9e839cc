// squintsense command-line tool.
//
// Subcommands:
//   beampattern  tabulate |gain|(subcarrier, angle) for a designed sweep
//   sense        run one sensing session and print the intermediate steps
//   sweep        run a Monte-Carlo scenario file and write the CSV table
//
// Exit codes: 0 success, 1 runtime/IO error, 2 usage or configuration
// error, 3 user outside the sensing range.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <squintsense/squintsense.hpp>

#include "scenario_io.hpp"

namespace {

using namespace squintsense;

struct GeometryFlags {
  std::size_t m = 128;
  double p = 1.0;
  std::string fc = "30 GHz";
  std::string bw = "6 GHz";
  std::size_t n = 1024;
  double theta0 = -80.0;
  double thetac = 80.0;
};

void add_geometry(CLI::App* cmd, GeometryFlags& g) {
  cmd->add_option("--m", g.m, "antenna count M");
  cmd->add_option("--p", g.p,
                  "antenna spacing in half carrier wavelengths (P)");
  cmd->add_option("--fc", g.fc,
                  "carrier frequency (Hz, unit suffixes allowed: 30GHz)");
  cmd->add_option("--bw", g.bw, "sweep bandwidth F (Hz or unit suffix)");
  cmd->add_option("--n", g.n, "subcarrier count N");
  cmd->add_option("--theta0", g.theta0, "sweep start angle theta_0, degrees");
  cmd->add_option("--thetac", g.thetac, "sweep end angle theta_c, degrees");
}

double parse_frequency_flag(const std::string& text, const std::string& key) {
  return squintsense_cli::detail::parse_frequency(nlohmann::ordered_json(text),
                                                  key);
}

SystemConfig to_config(const GeometryFlags& g) {
  SystemConfig cfg;
  cfg.antenna_count = g.m;
  cfg.spacing_ratio = g.p;
  cfg.carrier_hz = parse_frequency_flag(g.fc, "--fc");
  cfg.bandwidth_hz = parse_frequency_flag(g.bw, "--bw");
  cfg.subcarrier_count = g.n;
  cfg.validate();
  return cfg;
}

void print_candidates(const char* label, const CandidateSet& set) {
  std::printf("%s:", label);
  for (double c : set.all()) {
    std::printf(" %.12g", c);
  }
  std::printf("\n");
}

// --- beampattern ----------------------------------------------------------

int cmd_beampattern(const GeometryFlags& g, std::size_t angle_grid,
                    const std::string& out) {
  if (angle_grid < 1) {
    throw std::invalid_argument("--angle-grid must be >= 1");
  }
  const SystemConfig cfg = to_config(g);
  const FrontendDesign design = design_frontend(cfg, g.theta0, g.thetac);
  const SubcarrierGrid grid = subcarrier_grid(cfg);

  std::ofstream file(out, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open '" + out + "' for writing");
  }
  file << "f_hz,angle_deg,gain\n";
  char row[160];
  std::size_t rows = 0;
  for (double f : grid.frequencies) {
    for (std::size_t k = 0; k < angle_grid; ++k) {
      // midpoint raster: angles strictly inside (-90, 90)
      const double angle =
          -90.0 + (static_cast<double>(k) + 0.5) * 180.0 /
                      static_cast<double>(angle_grid);
      const double gain = chain_gain(design, angle, f);
      std::snprintf(row, sizeof(row), "%.12g,%.12g,%.12g\n", f, angle, gain);
      file << row;
      ++rows;
    }
  }
  if (!file) {
    throw std::runtime_error("write to '" + out + "' failed");
  }
  file.close();
  std::printf("wrote %s: %zu rows\n", out.c_str(), rows);
  return 0;
}

// --- sense ----------------------------------------------------------------

int cmd_sense(const GeometryFlags& g, const std::string& method,
              double user_angle, const std::string& snr,
              std::uint64_t seed) {
  const SystemConfig cfg = to_config(g);
  double snr_db = 0.0;
  try {
    snr_db = std::stod(snr);  // accepts "inf" for the noiseless case
  } catch (const std::exception&) {
    throw std::invalid_argument("--snr must be a number in dB or 'inf'");
  }
  const double variance = snr_to_noise(cfg, snr_db);
  UserTruth user;
  user.aod_deg = user_angle;
  user.validate();
  const SubcarrierGrid grid = subcarrier_grid(cfg);
  const NoiseModel noise{variance, seed};

  std::printf("truth_deg: %.12g\n", user.aod_deg);
  std::printf("noise_variance: %.12g\n", variance);

  if (method == "squint") {
    const FrontendDesign design = design_frontend(cfg, g.theta0, g.thetac);
    const FeedbackReport report =
        simulate_feedback(design, user, grid, noise);
    std::printf("feedback_index: %zu\n", report.subcarrier_index);
    std::printf("feedback_covered: %s\n", report.covered ? "yes" : "no");
    const double estimate = sense_squint(design, report);  // may exit 3
    std::printf("candidates: %.12g\n", estimate);
    std::printf("estimate_deg: %.12g\n", estimate);
    std::printf("blocks_used: 1\n");
    return 0;
  }
  if (method != "split") {
    throw std::invalid_argument("--method must be 'squint' or 'split'");
  }

  const SplitSession session =
      run_split_session(cfg, g.theta0, g.thetac, user, grid, noise);
  std::printf("feedback_index_pass1: %zu\n",
              session.first_report.subcarrier_index);
  std::printf("feedback_covered_pass1: %s\n",
              session.first_report.covered ? "yes" : "no");
  if (session.status == SessionStatus::not_in_range) {
    std::printf("blocks_used: %d\n", session.blocks_used);
    throw not_in_range_error("user outside every piece of the sensing range");
  }
  if (session.status == SessionStatus::validation_unavailable) {
    std::printf("blocks_used: %d\n", session.blocks_used);
    throw validation_unavailable_error(
        "no ambiguity-breaking validation design exists for this geometry");
  }
  print_candidates("candidates_pass1", session.first_candidates);
  std::printf("feedback_index_pass2: %zu\n",
              session.second_report.subcarrier_index);
  std::printf("feedback_covered_pass2: %s\n",
              session.second_report.covered ? "yes" : "no");
  print_candidates("candidates_pass2", session.second_candidates);
  std::printf("intersection_tol_sin: %.12g\n", session.tol_sin);
  std::printf("blocks_used: %d\n", session.blocks_used);
  if (session.status == SessionStatus::no_intersection) {
    throw no_intersection_error(
        "candidate sets of the two passes do not intersect");
  }
  if (session.status == SessionStatus::ambiguous) {
    throw ambiguous_intersection_error(
        "multiple disjoint candidate pairs fall within tolerance");
  }
  std::printf("estimate_deg: %.12g\n", session.estimate_deg);
  return 0;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const std::string& scenario_path, bool dry_run) {
  const squintsense_cli::LoadedScenario loaded =
      squintsense_cli::load_scenario(scenario_path);
  if (dry_run) {
    std::cout << loaded.resolved.dump(2) << "\n";
    return 0;
  }
  const std::vector<RMSEStat> table =
      run_scenario(loaded.config, [](const RMSEStat& stat) {
        std::fprintf(stderr,
                     "point done: M=%zu N=%zu snr=%g dB rmse=%g deg "
                     "coverage=%g\n",
                     stat.antennas, stat.subcarriers, stat.snr_db,
                     stat.rmse_deg, stat.coverage_rate);
      });
  emit_results(loaded.config, table, loaded.output_path);
  std::printf("wrote %s: %zu rows\n", loaded.output_path.c_str(),
              table.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wideband beam squint / beam split sensing simulator"};
  app.require_subcommand(0, 1);

  GeometryFlags bp_geom;
  std::size_t angle_grid = 360;
  std::string bp_out = "beampattern.csv";
  CLI::App* bp = app.add_subcommand(
      "beampattern", "tabulate gain over the subcarrier x angle grid");
  add_geometry(bp, bp_geom);
  bp->add_option("--angle-grid", angle_grid,
                 "number of angle samples strictly inside (-90, 90)");
  bp->add_option("--out", bp_out, "output CSV path");

  GeometryFlags sense_geom;
  std::string method = "squint";
  double user_angle = 0.0;
  std::string snr = "inf";
  std::uint64_t seed = 0;
  CLI::App* sense = app.add_subcommand(
      "sense", "run a single sensing session and print each step");
  add_geometry(sense, sense_geom);
  sense->add_option("--method", method, "sensing method: squint | split");
  sense->add_option("--user-angle", user_angle, "true user direction, degrees")
      ->required();
  sense->add_option("--snr", snr, "per-subcarrier SNR in dB, or 'inf'");
  sense->add_option("--seed", seed, "base seed for all randomness");

  std::string scenario_path;
  bool dry_run = false;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run a Monte-Carlo scenario file and write its CSV table");
  sweep->add_option("scenario", scenario_path, "path to a scenario JSON file")
      ->required();
  sweep->add_flag("--dry-run", dry_run,
                  "validate and print the resolved scenario, do not run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  try {
    if (app.got_subcommand(bp)) {
      return cmd_beampattern(bp_geom, angle_grid, bp_out);
    }
    if (app.got_subcommand(sense)) {
      return cmd_sense(sense_geom, method, user_angle, snr, seed);
    }
    if (app.got_subcommand(sweep)) {
      return cmd_sweep(scenario_path, dry_run);
    }
    std::cerr << app.help();
    return 2;
  } catch (const not_in_range_error& e) {
    std::cerr << "error (user not in range): " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (configuration): " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error (configuration): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
