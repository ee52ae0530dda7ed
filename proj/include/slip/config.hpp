// Flat key = value run configuration ('#' starts a comment).
#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slip/fixed_point.hpp"
#include "slip/stance_sim.hpp"
#include "slip/types.hpp"

namespace slip {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  double at(int i) const {
    if (count == 1) return min;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

struct SweepConfig {
  SlipParams params;
  ControlInputs controls;  // gains and torque limit; p_bar/k_theta set per grid point
  SimOptions sim;
  Range p_bar_range{-1.55, -0.5, 20};
  Range k_theta_range{0.3, 0.75, 20};
  std::vector<Provenance> pipelines{Provenance::ClosedForm, Provenance::AnalyticNumeric,
                                    Provenance::SimulatorNumeric};
  std::filesystem::path output_dir = "out";
  bool seed_chaining = true;
  int workers = 1;
  double analytic_tolerance = 1e-9;
  double simulator_tolerance = 1e-6;

  // Single-run settings.
  ApexState apex_seed{1.5, 0.3};
  bool seed_from_fixed_point = false;
  int n_hops = 30;
  std::optional<int> k_theta_step_hop;
  double k_theta_step_value = 0.0;

  void validate() const {
    try {
      params.validate();
      controls.validate();
    } catch (const GaitError& e) {
      throw ConfigError(e.what());
    }
    for (const Range* r : {&p_bar_range, &k_theta_range}) {
      if (r->count < 1) throw ConfigError("grid count must be at least 1");
      if (!(r->min <= r->max)) throw ConfigError("grid range must satisfy min <= max");
    }
    if (k_theta_range.min < 0.0 || k_theta_range.max > 1.0) throw ConfigError("k_theta range must lie in [0, 1]");
    if (pipelines.empty()) throw ConfigError("no pipelines selected");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (n_hops < 1) throw ConfigError("n_hops must be at least 1");
    if (!(sim.dt > 0.0) || !(sim.control_period > 0.0) || !(sim.sample_period > 0.0))
      throw ConfigError("time steps must be positive");
    if (k_theta_step_hop && !(k_theta_step_value >= 0.0 && k_theta_step_value <= 1.0))
      throw ConfigError("k_theta_step_value must lie in [0, 1]");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("invalid number for '" + key + "': " + v);
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("invalid integer for '" + key + "': " + v);
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + v);
}

}  // namespace detail

/// Parses "key = value" lines into a map. Duplicate keys: last one wins.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

/// Applies key/value overrides on top of `cfg`. Unknown keys are errors.
inline void apply_overrides(SweepConfig& cfg, const std::map<std::string, std::string>& kv) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_int;
  for (const auto& [key, v] : kv) {
    if (key == "m") cfg.params.m = parse_double(key, v);
    else if (key == "k") cfg.params.k = parse_double(key, v);
    else if (key == "b") cfg.params.b = parse_double(key, v);
    else if (key == "r0") cfg.params.r0 = parse_double(key, v);
    else if (key == "g") cfg.params.g = parse_double(key, v);
    else if (key == "kp") cfg.controls.kp = parse_double(key, v);
    else if (key == "ki") cfg.controls.ki = parse_double(key, v);
    else if (key == "kd") cfg.controls.kd = parse_double(key, v);
    else if (key == "tau_max") {
      if (v == "none" || v.empty()) cfg.controls.tau_max.reset();
      else cfg.controls.tau_max = parse_double(key, v);
    }
    else if (key == "p_bar") cfg.controls.p_bar = parse_double(key, v);
    else if (key == "k_theta") cfg.controls.k_theta = parse_double(key, v);
    else if (key == "p_bar_min") cfg.p_bar_range.min = parse_double(key, v);
    else if (key == "p_bar_max") cfg.p_bar_range.max = parse_double(key, v);
    else if (key == "p_bar_count") cfg.p_bar_range.count = parse_int(key, v);
    else if (key == "k_theta_min") cfg.k_theta_range.min = parse_double(key, v);
    else if (key == "k_theta_max") cfg.k_theta_range.max = parse_double(key, v);
    else if (key == "k_theta_count") cfg.k_theta_range.count = parse_int(key, v);
    else if (key == "pipelines") {
      cfg.pipelines.clear();
      std::stringstream ss(v);
      std::string item;
      std::set<Provenance> seen;
      while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        const auto p = provenance_from_string(item);
        if (!p) throw ConfigError("unknown pipeline '" + item + "'");
        if (seen.insert(*p).second) cfg.pipelines.push_back(*p);
      }
    }
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "seed_chaining") cfg.seed_chaining = parse_bool(key, v);
    else if (key == "workers") cfg.workers = parse_int(key, v);
    else if (key == "analytic_tolerance") cfg.analytic_tolerance = parse_double(key, v);
    else if (key == "simulator_tolerance") cfg.simulator_tolerance = parse_double(key, v);
    else if (key == "dt") cfg.sim.dt = parse_double(key, v);
    else if (key == "control_period") cfg.sim.control_period = parse_double(key, v);
    else if (key == "sample_period") cfg.sim.sample_period = parse_double(key, v);
    else if (key == "torque_mode") {
      if (v == "zoh") cfg.sim.torque_mode = TorqueMode::ZeroOrderHold;
      else if (v == "continuous") cfg.sim.torque_mode = TorqueMode::Continuous;
      else if (v == "off") cfg.sim.torque_mode = TorqueMode::Off;
      else throw ConfigError("torque_mode must be zoh, continuous or off");
    }
    else if (key == "apex_x_dot") cfg.apex_seed.x_dot = parse_double(key, v);
    else if (key == "apex_y") cfg.apex_seed.y = parse_double(key, v);
    else if (key == "seed_from_fixed_point") cfg.seed_from_fixed_point = parse_bool(key, v);
    else if (key == "n_hops") cfg.n_hops = parse_int(key, v);
    else if (key == "k_theta_step_hop") cfg.k_theta_step_hop = parse_int(key, v);
    else if (key == "k_theta_step_value") cfg.k_theta_step_value = parse_double(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

inline SweepConfig load_config(const std::filesystem::path& path,
                               const std::map<std::string, std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  SweepConfig cfg;
  apply_overrides(cfg, parse_key_values(in));
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

}  // namespace slip
