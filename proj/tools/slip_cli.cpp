// slip: sweeps, multi-hop runs and fixed points from a key = value config.
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 every point failed.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slip/slip.hpp"
#include "slip/sweep.hpp"
#include "slip/validation.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kAllFailed = 3;

std::map<std::string, std::string> parse_set_flags(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> kv;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw slip::ConfigError("--set expects key=value, got '" + s + "'");
    kv[slip::detail::trim(s.substr(0, eq))] = slip::detail::trim(s.substr(eq + 1));
  }
  return kv;
}

slip::SweepConfig load(const std::string& path, const std::vector<std::string>& sets) {
  if (path.empty()) {
    slip::SweepConfig cfg;
    slip::apply_overrides(cfg, parse_set_flags(sets));
    cfg.validate();
    return cfg;
  }
  return slip::load_config(path, parse_set_flags(sets));
}

int cmd_sweep(const slip::SweepConfig& cfg) {
  const slip::SweepReport rep = slip::run_sweep(cfg);
  slip::write_sweep_outputs(rep, cfg.output_dir);
  std::printf("%d/%zu points converged in %.1f s -> %s\n", rep.converged(), rep.points.size(), rep.elapsed_seconds,
              cfg.output_dir.string().c_str());
  for (const auto& e : rep.errors) {
    std::printf("  %s vs %s (n=%d): rms x_dot %s m/s (%s%%), rms y %s m (%s%%)\n",
                std::string(slip::to_string(e.pred)).c_str(), std::string(slip::to_string(e.ref)).c_str(), e.n,
                slip::format_number(e.rms_x_dot).c_str(), slip::format_number(e.pct_rms_x_dot).c_str(),
                slip::format_number(e.rms_y).c_str(), slip::format_number(e.pct_rms_y).c_str());
  }
  return rep.converged() == 0 ? kAllFailed : 0;
}

int cmd_single(const slip::SweepConfig& cfg) {
  const slip::SingleRun run = slip::run_single(cfg);
  slip::write_single_outputs(cfg, run, cfg.output_dir);
  const auto& z = run.apexes.back();
  std::printf("%zu hops, final apex x_dot %s y %s -> %s\n", run.hops.size(), slip::format_number(z.x_dot).c_str(),
              slip::format_number(z.y).c_str(), cfg.output_dir.string().c_str());
  if (run.failure) {
    std::fprintf(stderr, "stopped at hop %d: %s %s\n", run.failure->hop, run.failure->status.c_str(),
                 run.failure->message.c_str());
    return 1;
  }
  return 0;
}

int cmd_fixed_point(const slip::SweepConfig& base, double p_bar, double k_theta, const std::string& pipeline) {
  const auto pl = slip::provenance_from_string(pipeline);
  if (!pl) throw slip::ConfigError("unknown pipeline '" + pipeline + "'");
  slip::SweepConfig cfg = base;
  cfg.pipelines = {*pl};
  const slip::PointResult pr = slip::compute_point(cfg, p_bar, k_theta).front();
  if (!pr.ok()) {
    std::fprintf(stderr, "%s: %s\n", pr.status.c_str(), pr.message.c_str());
    return kAllFailed;
  }
  const auto& r = *pr.result;
  nlohmann::ordered_json j;
  j["p_bar"] = p_bar;
  j["k_theta"] = k_theta;
  j["pipeline"] = pipeline;
  j["x_dot"] = r.apex.x_dot;
  j["y"] = r.apex.y;
  j["jacobian"] = {{r.jacobian[0][0], r.jacobian[0][1]}, {r.jacobian[1][0], r.jacobian[1][1]}};
  j["spectral_radius"] = r.spectral_radius;
  j["stable"] = r.stable;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  if (r.touchdown) {
    j["touchdown"] = {{"r_dot", r.touchdown->r_dot_td},
                      {"theta", r.touchdown->theta_td},
                      {"theta_dot", r.touchdown->theta_dot_td},
                      {"theta_offset", r.touchdown->theta_offset}};
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_validate(const slip::SweepConfig& cfg) {
  bool all = true;
  for (const auto& c : slip::run_invariant_checks(cfg)) {
    std::printf("%s  %-42s %s (limit %s) %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                slip::format_number(c.value).c_str(), slip::format_number(c.limit).c_str(), c.note.c_str());
    all = all && c.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SLIP hopper return-map toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::vector<std::string> sets;
  app.add_option("--set", sets, "Override a config key (key=value); repeatable");

  std::string sweep_cfg, single_cfg, fp_cfg, validate_cfg;
  auto* sweep = app.add_subcommand("sweep", "Fixed points over a (p_bar, k_theta) grid");
  sweep->add_option("config", sweep_cfg, "Config file")->required();
  auto* single = app.add_subcommand("single", "Chain simulated hops from an apex seed");
  single->add_option("config", single_cfg, "Config file")->required();

  double p_bar = 0.0, k_theta = 0.0;
  std::string pipeline = "simulator-numeric";
  auto* fp = app.add_subcommand("fixed-point", "Fixed point at one control setting");
  fp->add_option("config", fp_cfg, "Config file")->required();
  fp->add_option("--p-bar", p_bar, "Target angular momentum")->required();
  fp->add_option("--k-theta", k_theta, "Touchdown-angle gain")->required();
  fp->add_option("--pipeline", pipeline, "closed-form | analytic-numeric | simulator-numeric");

  auto* validate = app.add_subcommand("validate", "Run the invariant checks");
  validate->add_option("config", validate_cfg, "Optional config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*sweep) return cmd_sweep(load(sweep_cfg, sets));
    if (*single) return cmd_single(load(single_cfg, sets));
    if (*fp) return cmd_fixed_point(load(fp_cfg, sets), p_bar, k_theta, pipeline);
    if (*validate) return cmd_validate(load(validate_cfg, sets));
  } catch (const slip::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
