// Unit tests for the analog frontend: PS/TTD design, beam direction versus
// frequency, grating aliases, trajectories, and the closed-form chain
// response.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <squintsense/squintsense.hpp>

using namespace squintsense;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemConfig default_config() { return SystemConfig{}; }

// Independent recomputation of the main-beam sine at offset f, used as an
// oracle against beam_direction.
double oracle_beam_sin(const FrontendDesign& d, double f) {
  const double s0 = std::sin(deg_to_rad(d.theta0_deg));
  const double sc = std::sin(deg_to_rad(d.thetac_deg));
  const double fc = d.config.carrier_hz;
  const double band = d.config.bandwidth_hz;
  // linear interpolation happens in the phase domain:
  // Theta(f) = phi - f*slope grows linearly from (P/2)s0 to (P/2)sc(1+F/fc),
  // and sin(theta(f)) = Theta(f) / ((P/2)(1+f/fc)).
  const double half_p = d.config.spacing_ratio / 2.0;
  const double theta_f =
      half_p * s0 + (half_p * sc * (1.0 + band / fc) - half_p * s0) * f / band;
  return theta_f / (half_p * (1.0 + f / fc));
}

}  // namespace

TEST_CASE("frontend design pins the phase shifter and delay slope") {
  SystemConfig cfg = default_config();
  const FrontendDesign d = design_frontend(cfg, -80.0, 80.0);
  REQUIRE_THAT(d.ps_phase, WithinRel(0.5 * sin_deg(-80.0), 1e-15));
  // Frozen oracle: (P/2)[sin(-80) - sin(80)*1.2]/6e9
  REQUIRE_THAT(d.ttd_slope, WithinRel(-1.8054808805223813e-10, 1e-13));
  REQUIRE(d.theta0_deg == -80.0);
  REQUIRE(d.thetac_deg == 80.0);
}

TEST_CASE("frontend design rejects degenerate or out-of-range sweeps") {
  SystemConfig cfg = default_config();
  REQUIRE_THROWS_AS(design_frontend(cfg, 10.0, 10.0), std::invalid_argument);
  REQUIRE_THROWS_AS(design_frontend(cfg, -90.0, 10.0), std::invalid_argument);
  REQUIRE_THROWS_AS(design_frontend(cfg, 10.0, 90.0), std::invalid_argument);
  SystemConfig bad = cfg;
  bad.antenna_count = 0;
  REQUIRE_THROWS_AS(design_frontend(bad, 0.0, 20.0), std::invalid_argument);
}

TEST_CASE("beam direction interpolates the sweep endpoints") {
  SystemConfig cfg = default_config();
  const FrontendDesign d = design_frontend(cfg, 0.0, 20.0);
  REQUIRE_THAT(beam_direction(d, 0.0), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(beam_direction(d, cfg.bandwidth_hz), WithinAbs(20.0, 1e-12));
  // Frozen oracle at mid-band: sin = 0.18655644181401795.
  const double mid = beam_direction(d, 3e9);
  REQUIRE_THAT(mid, WithinRel(10.751889888478699, 1e-13));
  REQUIRE_THAT(sin_deg(mid), WithinRel(0.18655644181401795, 1e-13));
}

TEST_CASE("beam direction matches an independent phase-domain oracle") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> angle(-85.0, 85.0);
  std::uniform_real_distribution<double> ratio(0.5, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    SystemConfig cfg = default_config();
    cfg.spacing_ratio = ratio(rng);
    double t0 = angle(rng);
    double tc = angle(rng);
    if (t0 == tc) {
      tc += 1.0;
    }
    const FrontendDesign d = design_frontend(cfg, t0, tc);
    const double f =
        std::uniform_real_distribution<double>(0.0, cfg.bandwidth_hz)(rng);
    REQUIRE_THAT(sin_deg(beam_direction(d, f)),
                 WithinAbs(oracle_beam_sin(d, f), 1e-12));
  }
}

TEST_CASE("beam direction rejects out-of-band frequencies") {
  const FrontendDesign d = design_frontend(default_config(), 0.0, 20.0);
  REQUIRE_THROWS_AS(beam_direction(d, -1.0), std::domain_error);
  REQUIRE_THROWS_AS(beam_direction(d, d.config.bandwidth_hz + 1.0),
                    std::domain_error);
}

TEST_CASE("physical delays are nonnegative with a zero minimum") {
  SystemConfig cfg = default_config();
  cfg.antenna_count = 16;

  SECTION("ascending sweep (negative raw slope)") {
    const FrontendDesign d = design_frontend(cfg, -30.0, 40.0);
    REQUIRE(d.ttd_slope < 0.0);
    const std::vector<double> delays = d.physical_delays();
    REQUIRE(delays.size() == 16);
    REQUIRE(*std::min_element(delays.begin(), delays.end()) == 0.0);
    for (std::size_t m = 1; m < delays.size(); ++m) {
      REQUIRE(delays[m] >= 0.0);
      REQUIRE_THAT(delays[m] - delays[m - 1], WithinRel(d.ttd_slope, 1e-12));
    }
  }

  SECTION("descending sweep (positive raw slope)") {
    const FrontendDesign d = design_frontend(cfg, 40.0, -30.0);
    REQUIRE(d.ttd_slope > 0.0);
    const std::vector<double> delays = d.physical_delays();
    REQUIRE(delays.front() == 0.0);
    REQUIRE_THAT(delays.back(), WithinRel(15.0 * d.ttd_slope, 1e-12));
  }
}

TEST_CASE("frontend response has unit modulus and the designed progression") {
  SystemConfig cfg = default_config();
  cfg.antenna_count = 12;
  const FrontendDesign d = design_frontend(cfg, -15.0, 35.0);
  const double f = 2e9;
  const cvector g = frontend_response(d, f);
  REQUIRE(g.size() == 12);
  for (std::size_t m = 0; m < g.size(); ++m) {
    REQUIRE_THAT(std::abs(g[m]), WithinRel(1.0, 1e-12));
    const double cycles =
        static_cast<double>(m) * (d.ps_phase - f * d.ttd_slope);
    const double a = 2.0 * kPi * cycles;
    REQUIRE_THAT(g[m].real(), WithinAbs(std::cos(a), 1e-12));
    REQUIRE_THAT(g[m].imag(), WithinAbs(std::sin(a), 1e-12));
  }
  REQUIRE_THROWS_AS(frontend_response(d, -1.0), std::domain_error);
  REQUIRE_THROWS_AS(frontend_response(d, cfg.bandwidth_hz * 1.001),
                    std::domain_error);
}

TEST_CASE("half-wavelength arrays get grating aliases only near band edge") {
  SystemConfig cfg = default_config();  // P = 1, F = 0.2 f_c
  // At f=0 the grating shift is 2: nothing can fold into [-1, 1] from a
  // visible direction.
  REQUIRE(split_angles(cfg, 80.0, 0.0).aliases_deg.empty());
  // At f=F the shift contracts to 2/1.2; sin(80deg) - 2/1.2 = -0.682 is
  // visible, so one alias appears.
  const SplitAliasSet set = split_angles(cfg, 80.0, cfg.bandwidth_hz);
  REQUIRE(set.aliases_deg.size() == 1);
  REQUIRE(set.z_values[0] == 1);
  const double expected = asin_deg(sin_deg(80.0) - 2.0 / 1.2);
  REQUIRE_THAT(set.aliases_deg[0], WithinRel(expected, 1e-12));
}

TEST_CASE("grating aliases for wider spacings at the carrier") {
  SystemConfig cfg = default_config();

  SECTION("P=3 at broadside: symmetric pair at +-41.81 degrees") {
    cfg.spacing_ratio = 3.0;
    const SplitAliasSet set = split_angles(cfg, 0.0, 0.0);
    REQUIRE(set.aliases_deg.size() == 2);
    std::vector<double> sorted = set.aliases_deg;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE_THAT(sorted[0], WithinRel(-41.810314895778596, 1e-13));
    REQUIRE_THAT(sorted[1], WithinRel(+41.810314895778596, 1e-13));
  }

  SECTION("P=2 at 30 degrees, f = 0.2 f_c: single alias at -19.47 degrees") {
    cfg.spacing_ratio = 2.0;
    const SplitAliasSet set = split_angles(cfg, 30.0, 0.2 * cfg.carrier_hz);
    REQUIRE(set.aliases_deg.size() == 1);
    REQUIRE(set.z_values[0] == 1);
    REQUIRE_THAT(set.aliases_deg[0], WithinRel(-19.471220634490695, 1e-13));
  }

  SECTION("angle domain is enforced") {
    REQUIRE_THROWS_AS(split_angles(cfg, 90.0, 0.0), std::domain_error);
  }
}

TEST_CASE("alias offsets are exact multiples of the grating shift") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> angle(-85.0, 85.0);
  for (double p : {1.0, 2.0, 3.0, 4.0}) {
    SystemConfig cfg = default_config();
    cfg.spacing_ratio = p;
    for (int trial = 0; trial < 25; ++trial) {
      const double aod = angle(rng);
      const double f =
          std::uniform_real_distribution<double>(0.0, cfg.bandwidth_hz)(rng);
      const SplitAliasSet set = split_angles(cfg, aod, f);
      const double shift_unit = 2.0 / (p * (1.0 + f / cfg.carrier_hz));
      for (std::size_t i = 0; i < set.aliases_deg.size(); ++i) {
        REQUIRE(std::abs(sin_deg(set.aliases_deg[i])) <= 1.0 + 1e-15);
        const double offset = sin_deg(aod) - sin_deg(set.aliases_deg[i]);
        const double multiple = offset / shift_unit;
        REQUIRE_THAT(multiple,
                     WithinAbs(static_cast<double>(set.z_values[i]), 1e-12));
        REQUIRE(set.z_values[i] != 0);
      }
    }
  }
}

TEST_CASE("beam trajectory tabulates direction and aliases per frequency") {
  SystemConfig cfg = default_config();

  SECTION("single-point grid echoes the initial angle") {
    const FrontendDesign d = design_frontend(cfg, -10.0, 25.0);
    const auto traj = beam_trajectory(d, {0.0});
    REQUIRE(traj.size() == 1);
    REQUIRE_THAT(traj[0].first, WithinAbs(-10.0, 1e-12));
    REQUIRE(traj[0].second.aliases_deg ==
            split_angles(cfg, traj[0].first, 0.0).aliases_deg);
  }

  SECTION("half-wavelength narrow sweep has empty alias sets") {
    const FrontendDesign d = design_frontend(cfg, 0.0, 20.0);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) {
      grid.push_back(cfg.bandwidth_hz * i / 20.0);
    }
    for (const auto& [main_deg, aliases] : beam_trajectory(d, grid)) {
      REQUIRE(aliases.aliases_deg.empty());
    }
  }

  SECTION("full-wavelength sweep: monotone main plus one alias trajectory") {
    cfg.spacing_ratio = 2.0;
    const FrontendDesign d =
        design_frontend(cfg, asin_deg(0.06), asin_deg(0.50));
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) {
      grid.push_back(cfg.bandwidth_hz * i / 40.0);
    }
    const auto traj = beam_trajectory(d, grid);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      REQUIRE(traj[i].second.aliases_deg.size() == 1);
      REQUIRE(traj[i].second.z_values[0] == 1);
      if (i > 0) {
        REQUIRE(sin_deg(traj[i].first) > sin_deg(traj[i - 1].first));
      }
    }
  }

  SECTION("grid validation") {
    const FrontendDesign d = design_frontend(cfg, 0.0, 20.0);
    REQUIRE_THROWS_AS(beam_trajectory(d, {0.0, 0.0}), std::domain_error);
    REQUIRE_THROWS_AS(beam_trajectory(d, {1e9, 0.5e9}), std::domain_error);
    REQUIRE_THROWS_AS(beam_trajectory(d, {-1.0}), std::domain_error);
    REQUIRE_THROWS_AS(beam_trajectory(d, {cfg.bandwidth_hz + 1.0}),
                      std::domain_error);
  }
}

TEST_CASE("closed-form chain response matches the explicit inner product") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> angle(-89.0, 89.0);
  for (double p : {0.5, 1.0, 2.0, 4.0}) {
    SystemConfig cfg = default_config();
    cfg.antenna_count = 64;
    cfg.spacing_ratio = p;
    for (int trial = 0; trial < 50; ++trial) {
      double t0 = angle(rng);
      double tc = angle(rng);
      if (t0 == tc) {
        tc += 1.0;
      }
      const FrontendDesign d = design_frontend(cfg, t0, tc);
      const double aod = angle(rng);
      const double f =
          std::uniform_real_distribution<double>(0.0, cfg.bandwidth_hz)(rng);

      const cvector g = frontend_response(d, f);
      const SteeringVector a = steering_vector(cfg, aod, f);
      const cdouble explicit_sum = received_symbol(a, g, {0.0, 0.0});
      const cdouble closed = chain_response(d, aod, f);
      REQUIRE_THAT(std::abs(closed - explicit_sum),
                   WithinAbs(0.0, 1e-9 * static_cast<double>(
                                             cfg.antenna_count)));
      // and the gain route agrees too
      REQUIRE_THAT(chain_gain(d, aod, f),
                   WithinAbs(array_gain(cfg, aod, f, g),
                             1e-9 * static_cast<double>(cfg.antenna_count)));
    }
  }
}

TEST_CASE("chain gain peaks at exactly M at the designed endpoints") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-85.0, 85.0);
  for (int trial = 0; trial < 25; ++trial) {
    SystemConfig cfg = default_config();
    cfg.antenna_count = 8 + 7 * static_cast<std::size_t>(trial);
    cfg.spacing_ratio = (trial % 2 == 0) ? 1.0 : 2.0;
    double t0 = angle(rng);
    double tc = angle(rng);
    if (t0 == tc) {
      tc += 1.0;
    }
    const FrontendDesign d = design_frontend(cfg, t0, tc);
    const double m = static_cast<double>(cfg.antenna_count);
    REQUIRE_THAT(chain_gain(d, t0, 0.0), WithinRel(m, 1e-9));
    REQUIRE_THAT(chain_gain(d, tc, cfg.bandwidth_hz), WithinRel(m, 1e-9));
  }
}
