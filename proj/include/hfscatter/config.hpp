#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfscatter/constants.hpp"
#include "hfscatter/polarization.hpp"

// Run configuration: a plain INI-style text file with [section] headers and
// key = value lines ('#' comments).  Parsing is fail-closed: any section or
// key that is not recognized aborts with a ConfigError.

namespace hfs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CalibrationMode { none, tau_dec, stark };

struct RunConfig {
  AtomConstants atom;

  struct Laser {
    std::vector<double> detunings_hz = {227.5e9};
    std::string polarization = "sigma+";
    double g_hz = 0.0;  // used when calibration == none
    CalibrationMode calibration = CalibrationMode::tau_dec;
    double calibration_target = 0.5e-3;  // s for tau_dec, Hz for stark
  } laser;

  struct Sequence {
    std::vector<double> tau_echo_s = {25e-6, 50e-6, 75e-6, 100e-6, 150e-6,
                                      200e-6, 250e-6, 325e-6, 400e-6, 500e-6};
    int n_pi = 4;
    double pi_time_s = 5e-6;
  } sequence;

  struct Relax {
    std::vector<double> times_s;  // empty: auto grid from the model decay time
    std::string initial = "up";
    bool noiseless = false;
  } relax;

  struct Detection {
    double bright_mean = 12.0;
    double dark_mean = 1.0;
    int repetitions = 400;
  } detection;

  struct Mc {
    int n_traj = 2000;
    std::uint64_t seed = 1;
  } mc;

  std::string output_dir = "out";
  std::string mode = "analytic";  // analytic | mc

  Polarization make_polarization() const {
    if (laser.polarization == "sigma+") return Polarization::sigma_plus();
    if (laser.polarization == "sigma-") return Polarization::sigma_minus();
    if (laser.polarization == "pi") return Polarization::pi_linear();
    // comma triple of real amplitudes c-,c0,c+
    std::istringstream is(laser.polarization);
    std::string tok;
    std::vector<double> c;
    while (std::getline(is, tok, ','))
      try {
        c.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad polarization component '" + tok + "'");
      }
    if (c.size() != 3)
      throw ConfigError("polarization must be sigma+/sigma-/pi or three components");
    try {
      return Polarization::from_amplitudes(c[0], c[1], c[2]);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad polarization: ") + e.what());
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(value);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value '" + tok + "' for key " + key);
    }
  }
  if (out.empty()) throw ConfigError("empty value for key " + key);
  return out;
}

inline double parse_double(const std::string& value, const std::string& key) {
  const auto list = parse_list(value, key);
  if (list.size() != 1) throw ConfigError("expected a single number for key " + key);
  return list[0];
}

inline int parse_int(const std::string& value, const std::string& key) {
  const double v = parse_double(value, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw ConfigError("expected an integer for key " + key);
  return i;
}

inline bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("expected a boolean for key " + key);
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;

  const std::set<std::string> known_sections = {"atom", "laser", "sequence",
                                                "relax", "detection", "mc", "output"};

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) +
                                                ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        throw ConfigError("unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_list;

    if (qual == "atom.fine_splitting_hz") {
      cfg.atom.fine_splitting = angular(parse_double(value, qual));
    } else if (qual == "atom.qubit_splitting_hz") {
      cfg.atom.qubit_splitting = angular(parse_double(value, qual));
    } else if (qual == "atom.gamma_hz") {
      cfg.atom.gamma = angular(parse_double(value, qual));
    } else if (qual == "atom.wavelength_m") {
      cfg.atom.wavelength = parse_double(value, qual);
    } else if (qual == "atom.b_field_t") {
      cfg.atom.b_field = parse_double(value, qual);
    } else if (qual == "atom.a_hf_hz") {
      cfg.atom.a_hf = angular(parse_double(value, qual));
    } else if (qual == "atom.g_j") {
      cfg.atom.g_j = parse_double(value, qual);
    } else if (qual == "atom.g_i_prime") {
      cfg.atom.g_i_prime = parse_double(value, qual);
    } else if (qual == "laser.detuning_hz") {
      cfg.laser.detunings_hz = parse_list(value, qual);
    } else if (qual == "laser.polarization") {
      cfg.laser.polarization = value;
    } else if (qual == "laser.g_hz") {
      cfg.laser.g_hz = parse_double(value, qual);
      cfg.laser.calibration = CalibrationMode::none;
    } else if (qual == "laser.calibrate") {
      if (value == "none")
        cfg.laser.calibration = CalibrationMode::none;
      else if (value == "tau_dec")
        cfg.laser.calibration = CalibrationMode::tau_dec;
      else if (value == "stark")
        cfg.laser.calibration = CalibrationMode::stark;
      else
        throw ConfigError("laser.calibrate must be none, tau_dec or stark");
    } else if (qual == "laser.calibrate_target") {
      cfg.laser.calibration_target = parse_double(value, qual);
    } else if (qual == "sequence.tau_echo_s") {
      cfg.sequence.tau_echo_s = parse_list(value, qual);
    } else if (qual == "sequence.n_pi") {
      cfg.sequence.n_pi = parse_int(value, qual);
    } else if (qual == "sequence.pi_time_s") {
      cfg.sequence.pi_time_s = parse_double(value, qual);
    } else if (qual == "relax.times_s") {
      cfg.relax.times_s = parse_list(value, qual);
    } else if (qual == "relax.initial") {
      if (value != "up" && value != "down")
        throw ConfigError("relax.initial must be up or down");
      cfg.relax.initial = value;
    } else if (qual == "relax.noiseless") {
      cfg.relax.noiseless = parse_bool(value, qual);
    } else if (qual == "detection.bright_mean") {
      cfg.detection.bright_mean = parse_double(value, qual);
    } else if (qual == "detection.dark_mean") {
      cfg.detection.dark_mean = parse_double(value, qual);
    } else if (qual == "detection.repetitions") {
      cfg.detection.repetitions = parse_int(value, qual);
    } else if (qual == "mc.n_traj") {
      cfg.mc.n_traj = parse_int(value, qual);
    } else if (qual == "mc.seed") {
      cfg.mc.seed = static_cast<std::uint64_t>(parse_double(value, qual));
    } else if (qual == "output.dir") {
      cfg.output_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    }
  }

  try {
    cfg.atom.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid atom constants: ") + e.what());
  }
  if (cfg.mode != "analytic" && cfg.mode != "mc")
    throw ConfigError("mode must be analytic or mc");
  if (cfg.mc.n_traj < 1) throw ConfigError("mc.n_traj must be >= 1");
  if (cfg.sequence.n_pi < 2 || cfg.sequence.n_pi > 18)
    throw ConfigError("sequence.n_pi must lie between 2 and 18");
  cfg.make_polarization();  // validates
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace hfs
