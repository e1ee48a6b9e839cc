#pragma once

// Scenario-file loading for the command-line tool.
//
// A scenario is a single JSON object with a fixed key set (unknown keys are
// rejected so typos fail loudly).  Frequencies may be given as plain numbers
// in Hz or as strings with a unit suffix ("30 GHz", "250MHz", ...).
//
//   required: method            "squint" | "squint-split"
//             spacing_ratio     antenna spacing in half wavelengths (P)
//             carrier_hz        carrier frequency
//             bandwidth_hz      one-sided sweep bandwidth
//             aod_range_deg     [lo, hi] user-draw interval, degrees
//             sensing_range_deg [lo, hi] designed sweep (theta_0, theta_c)
//             snr_db_list       list of SNR points, dB
//             n_list            list of subcarrier counts
//             m_list            list of antenna counts
//             trials            Monte-Carlo trials per grid point
//             output            CSV output path
//   optional: rf_chains         default 1
//             seed              default 0
//             uncovered_policy  "exclude" (default) | "midpoint"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <squintsense/experiments.hpp>

namespace squintsense_cli {

// Raised for any structural problem with a scenario file; the tool maps it
// to exit code 2 (usage / configuration error).
class scenario_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LoadedScenario {
  squintsense::ScenarioConfig config;
  std::string output_path;
  nlohmann::ordered_json resolved;  // defaults filled in, units resolved
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(
    const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline double parse_frequency(const nlohmann::ordered_json& value,
                              const std::string& key) {
  if (value.is_number()) {
    return value.get<double>();
  }
  if (!value.is_string()) {
    throw scenario_error("scenario: '" + key +
                         "' must be a number in Hz or a string like "
                         "\"30 GHz\"");
  }
  const std::string text = value.get<std::string>();
  std::size_t pos = 0;
  double magnitude = 0.0;
  try {
    magnitude = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw scenario_error("scenario: cannot parse '" + key + "' value '" +
                         text + "'");
  }
  std::string unit = text.substr(pos);
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.front()))) {
    unit.erase(unit.begin());
  }
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) {
    unit.pop_back();
  }
  double scale = 0.0;
  if (unit.empty() || unit == "Hz" || unit == "hz") {
    scale = 1.0;
  } else if (unit == "kHz" || unit == "khz" || unit == "KHz") {
    scale = 1e3;
  } else if (unit == "MHz" || unit == "mhz") {
    scale = 1e6;
  } else if (unit == "GHz" || unit == "ghz") {
    scale = 1e9;
  } else if (unit == "THz" || unit == "thz") {
    scale = 1e12;
  } else {
    throw scenario_error("scenario: '" + key + "' has unknown unit '" + unit +
                         "' (expected Hz, kHz, MHz, GHz or THz)");
  }
  return magnitude * scale;
}

inline std::pair<double, double> parse_interval(
    const nlohmann::ordered_json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
      !value[1].is_number()) {
    throw scenario_error("scenario: '" + key +
                         "' must be a two-element numeric array [lo, hi]");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

inline std::vector<double> parse_number_list(
    const nlohmann::ordered_json& value, const std::string& key) {
  if (!value.is_array() || value.empty()) {
    throw scenario_error("scenario: '" + key +
                         "' must be a nonempty numeric array");
  }
  std::vector<double> out;
  for (const auto& item : value) {
    if (!item.is_number()) {
      throw scenario_error("scenario: '" + key +
                           "' must contain numbers only");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

inline std::vector<std::size_t> parse_count_list(
    const nlohmann::ordered_json& value, const std::string& key) {
  if (!value.is_array() || value.empty()) {
    throw scenario_error("scenario: '" + key +
                         "' must be a nonempty array of positive integers");
  }
  std::vector<std::size_t> out;
  for (const auto& item : value) {
    if (!item.is_number_unsigned() || item.get<std::uint64_t>() == 0) {
      throw scenario_error("scenario: '" + key +
                           "' must contain positive integers only");
    }
    out.push_back(static_cast<std::size_t>(item.get<std::uint64_t>()));
  }
  return out;
}

inline std::size_t parse_count(const nlohmann::ordered_json& value,
                               const std::string& key) {
  if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0) {
    throw scenario_error("scenario: '" + key +
                         "' must be a positive integer");
  }
  return static_cast<std::size_t>(value.get<std::uint64_t>());
}

}  // namespace detail

// Parse scenario text (e.g. file contents).  `origin` labels error messages.
inline LoadedScenario parse_scenario_text(const std::string& text,
                                          const std::string& origin) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = detail::line_column(
        text, e.byte > 0 ? static_cast<std::size_t>(e.byte - 1) : 0);
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << column
        << ": JSON syntax error: " << e.what();
    throw scenario_error(msg.str());
  }
  if (!doc.is_object()) {
    throw scenario_error(origin + ": scenario must be a JSON object");
  }

  static const std::set<std::string> known = {
      "method",       "spacing_ratio",     "carrier_hz",
      "bandwidth_hz", "aod_range_deg",     "sensing_range_deg",
      "snr_db_list",  "n_list",            "m_list",
      "trials",       "output",            "rf_chains",
      "seed",         "uncovered_policy"};
  for (const auto& item : doc.items()) {
    if (known.find(item.key()) == known.end()) {
      throw scenario_error(origin + ": unknown key '" + item.key() + "'");
    }
  }
  static const char* required[] = {
      "method",        "spacing_ratio", "carrier_hz",        "bandwidth_hz",
      "aod_range_deg", "sensing_range_deg", "snr_db_list",   "n_list",
      "m_list",        "trials",        "output"};
  for (const char* key : required) {
    if (!doc.contains(key)) {
      throw scenario_error(origin + ": missing required key '" +
                           std::string(key) + "'");
    }
  }

  squintsense::ScenarioConfig sc;

  const std::string method = doc["method"].is_string()
                                 ? doc["method"].get<std::string>()
                                 : std::string();
  if (method == "squint") {
    sc.method = squintsense::Method::squint_only;
  } else if (method == "squint-split") {
    sc.method = squintsense::Method::squint_split;
  } else {
    throw scenario_error(origin +
                         ": 'method' must be \"squint\" or \"squint-split\"");
  }

  if (!doc["spacing_ratio"].is_number()) {
    throw scenario_error(origin + ": 'spacing_ratio' must be a number");
  }
  sc.base.spacing_ratio = doc["spacing_ratio"].get<double>();
  sc.base.carrier_hz = detail::parse_frequency(doc["carrier_hz"], "carrier_hz");
  sc.base.bandwidth_hz =
      detail::parse_frequency(doc["bandwidth_hz"], "bandwidth_hz");
  sc.aod_range_deg = detail::parse_interval(doc["aod_range_deg"],
                                            "aod_range_deg");
  sc.sensing_range_deg = detail::parse_interval(doc["sensing_range_deg"],
                                                "sensing_range_deg");
  sc.snr_db_list = detail::parse_number_list(doc["snr_db_list"],
                                             "snr_db_list");
  sc.n_list = detail::parse_count_list(doc["n_list"], "n_list");
  sc.m_list = detail::parse_count_list(doc["m_list"], "m_list");
  sc.trials = detail::parse_count(doc["trials"], "trials");

  if (!doc["output"].is_string() ||
      doc["output"].get<std::string>().empty()) {
    throw scenario_error(origin + ": 'output' must be a nonempty string");
  }
  const std::string output = doc["output"].get<std::string>();

  if (doc.contains("rf_chains")) {
    sc.base.rf_chains = detail::parse_count(doc["rf_chains"], "rf_chains");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw scenario_error(origin +
                           ": 'seed' must be a non-negative integer");
    }
    sc.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("uncovered_policy")) {
    const std::string policy =
        doc["uncovered_policy"].is_string()
            ? doc["uncovered_policy"].get<std::string>()
            : std::string();
    if (policy == "exclude") {
      sc.uncovered_policy = squintsense::UncoveredPolicy::exclude;
    } else if (policy == "midpoint") {
      sc.uncovered_policy = squintsense::UncoveredPolicy::midpoint;
    } else {
      throw scenario_error(origin +
                           ": 'uncovered_policy' must be \"exclude\" or "
                           "\"midpoint\"");
    }
  }

  // run_scenario swaps in each (M, N) from the lists; keep the base counts
  // valid so validate() covers the rest of the geometry
  sc.base.antenna_count = sc.m_list.front();
  sc.base.subcarrier_count = sc.n_list.front();
  sc.validate();

  nlohmann::ordered_json resolved;
  resolved["method"] = method;
  resolved["spacing_ratio"] = sc.base.spacing_ratio;
  resolved["carrier_hz"] = sc.base.carrier_hz;
  resolved["bandwidth_hz"] = sc.base.bandwidth_hz;
  resolved["aod_range_deg"] = {sc.aod_range_deg.first,
                               sc.aod_range_deg.second};
  resolved["sensing_range_deg"] = {sc.sensing_range_deg.first,
                                   sc.sensing_range_deg.second};
  resolved["snr_db_list"] = sc.snr_db_list;
  resolved["n_list"] = sc.n_list;
  resolved["m_list"] = sc.m_list;
  resolved["trials"] = sc.trials;
  resolved["output"] = output;
  resolved["rf_chains"] = sc.base.rf_chains;
  resolved["seed"] = sc.seed;
  resolved["uncovered_policy"] =
      sc.uncovered_policy == squintsense::UncoveredPolicy::exclude
          ? "exclude"
          : "midpoint";

  return {sc, output, std::move(resolved)};
}

inline LoadedScenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw scenario_error("scenario: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

}  // namespace squintsense_cli
