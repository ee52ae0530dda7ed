// Grid sweeps over (p̄, kθ), multi-hop runs, and their CSV/JSON artifacts.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "slip/analytic_map.hpp"
#include "slip/config.hpp"
#include "slip/fixed_point.hpp"
#include "slip/numeric_map.hpp"
#include "slip/trajectory.hpp"

namespace slip {

// =============================================================================
// Per-point fixed points
// =============================================================================

struct PointResult {
  double p_bar = 0.0;
  double k_theta = 0.0;
  Provenance pipeline = Provenance::ClosedForm;
  std::optional<FixedPointResult> result;
  std::string status = "ok";  // "ok" or "<phase>:<code>"
  std::string message;

  bool ok() const { return result.has_value(); }
};

inline ControlInputs point_inputs(const SweepConfig& cfg, double p_bar, double k_theta) {
  ControlInputs in = cfg.controls;
  in.p_bar = p_bar;
  in.k_theta = k_theta;
  return in;
}

namespace detail {

inline std::string failure_status(const GaitError& e) {
  return std::string(to_string(e.phase())) + ":" + std::string(to_string(e.code()));
}

/// A gait runs in the direction p̄ pushes it; Newton occasionally lands on a
/// mirrored backward solution, which is not the gait being asked for.
inline bool forward_gait(const ApexState& z, double p_bar) { return z.x_dot * p_bar < 0.0; }

/// Iterates the map from `z` (height raised to clear the leg) and returns the
/// last state reached; stable gaits get pulled toward their fixed point.
inline std::optional<ApexState> warm_up(const ApexMap& map, ApexState z, double r0, int hops) {
  z.y = std::max(z.y, 1.25 * r0);
  std::optional<ApexState> last;
  for (int i = 0; i < hops; ++i) {
    try {
      z = map(z);
    } catch (const GaitError&) {
      break;
    }
    last = z;
  }
  return last;
}

}  // namespace detail

/// Newton from each seed in turn until one converges to a forward gait.
inline FixedPointResult newton_with_seeds(const ApexMap& map, const std::vector<ApexState>& seeds,
                                          Provenance provenance, double p_bar, const NewtonOptions& opt) {
  std::optional<GaitError> first_error;
  for (const ApexState& seed : seeds) {
    if (!std::isfinite(seed.x_dot) || !std::isfinite(seed.y)) continue;
    try {
      FixedPointResult r = numeric_fixed_point(map, seed, provenance, opt);
      if (detail::forward_gait(r.apex, p_bar)) return r;
      if (!first_error)
        first_error = GaitError(ErrorCode::NonPhysical, "converged to a backward gait", Phase::FixedPoint);
    } catch (const GaitError& e) {
      if (!first_error) first_error = e;
    }
  }
  if (first_error) throw *first_error;
  throw GaitError(ErrorCode::NoConvergence, "no usable seed", Phase::FixedPoint);
}

/// Fixed points of every requested pipeline at one grid point. `chain` holds
/// the previous grid point's results per pipeline (used as extra seeds).
inline std::vector<PointResult> compute_point(const SweepConfig& cfg, double p_bar, double k_theta,
                                              const std::map<Provenance, ApexState>& chain = {}) {
  const SlipParams& P = cfg.params;
  const ControlInputs in = point_inputs(cfg, p_bar, k_theta);
  std::map<Provenance, PointResult> done;
  auto record = [&](Provenance pl, auto&& fn) {
    PointResult pr{p_bar, k_theta, pl, std::nullopt, "ok", ""};
    try {
      pr.result = fn();
    } catch (const GaitError& e) {
      pr.status = detail::failure_status(e);
      pr.message = e.detail();
    }
    done[pl] = pr;
  };
  auto seeds_for = [&](Provenance pl) {
    std::vector<ApexState> seeds;
    if (auto it = chain.find(pl); it != chain.end()) seeds.push_back(it->second);
    for (Provenance other : {Provenance::AnalyticNumeric, Provenance::ClosedForm}) {
      if (auto it = done.find(other); it != done.end() && it->second.ok()) seeds.push_back(it->second.result->apex);
    }
    seeds.push_back(cfg.apex_seed);
    return seeds;
  };

  // The closed form is always evaluated: it seeds the numeric pipelines.
  record(Provenance::ClosedForm, [&] { return closed_form_fixed_point(p_bar, k_theta, P); });

  const bool want_an = std::find(cfg.pipelines.begin(), cfg.pipelines.end(), Provenance::AnalyticNumeric) !=
                       cfg.pipelines.end();
  const bool want_sim = std::find(cfg.pipelines.begin(), cfg.pipelines.end(), Provenance::SimulatorNumeric) !=
                        cfg.pipelines.end();
  if (want_an || want_sim) {
    NewtonOptions opt;
    opt.tolerance = cfg.analytic_tolerance;
    const ApexMap map = analytic_map_fn(in, P);
    record(Provenance::AnalyticNumeric, [&] {
      auto seeds = seeds_for(Provenance::AnalyticNumeric);
      try {
        return newton_with_seeds(map, seeds, Provenance::AnalyticNumeric, p_bar, opt);
      } catch (const GaitError&) {
        const auto w = detail::warm_up(map, seeds.front(), P.r0, 40);
        if (!w) throw;
        return newton_with_seeds(map, {*w}, Provenance::AnalyticNumeric, p_bar, opt);
      }
    });
  }
  if (want_sim) {
    NewtonOptions opt;
    opt.tolerance = cfg.simulator_tolerance;
    const ApexMap map = simulator_map_fn(in, P, cfg.sim);
    record(Provenance::SimulatorNumeric, [&] {
      auto seeds = seeds_for(Provenance::SimulatorNumeric);
      try {
        return newton_with_seeds(map, seeds, Provenance::SimulatorNumeric, p_bar, opt);
      } catch (const GaitError&) {
        const auto w = detail::warm_up(map, seeds.front(), P.r0, 40);
        if (!w) throw;
        return newton_with_seeds(map, {*w}, Provenance::SimulatorNumeric, p_bar, opt);
      }
    });
  }

  std::vector<PointResult> out;
  for (Provenance pl : cfg.pipelines) out.push_back(done.at(pl));
  return out;
}

// =============================================================================
// Sweep
// =============================================================================

/// Error of `pred` against `ref` over grid points where both converged.
struct PairError {
  Provenance pred = Provenance::ClosedForm;
  Provenance ref = Provenance::SimulatorNumeric;
  int n = 0;
  double rms_x_dot = 0.0;
  double rms_y = 0.0;
  double pct_rms_x_dot = 0.0;  // sqrt(mean(((pred−ref)/ref)²))·100
  double pct_rms_y = 0.0;
  double rel_mean_x_dot = 0.0;  // rms / mean|ref|, as a percentage
  double rel_mean_y = 0.0;
  double max_abs_x_dot = 0.0;
  double max_abs_y = 0.0;
};

struct SweepReport {
  SweepConfig config;
  std::vector<PointResult> points;  // grid order: p̄ outer, kθ inner, pipelines in config order
  std::vector<PairError> errors;
  double elapsed_seconds = 0.0;

  int converged() const {
    return static_cast<int>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.ok(); }));
  }
  int failed() const { return static_cast<int>(points.size()) - converged(); }
};

inline std::optional<PairError> pair_error(const std::vector<PointResult>& points, Provenance pred, Provenance ref) {
  std::map<std::pair<double, double>, ApexState> ref_at;
  for (const auto& p : points)
    if (p.pipeline == ref && p.ok()) ref_at[{p.p_bar, p.k_theta}] = p.result->apex;
  PairError e{pred, ref};
  double sx = 0, sy = 0, px = 0, py = 0, mx = 0, my = 0;
  for (const auto& p : points) {
    if (p.pipeline != pred || !p.ok()) continue;
    const auto it = ref_at.find({p.p_bar, p.k_theta});
    if (it == ref_at.end()) continue;
    const ApexState& r = it->second;
    const double dx = p.result->apex.x_dot - r.x_dot;
    const double dy = p.result->apex.y - r.y;
    sx += dx * dx;
    sy += dy * dy;
    px += (dx / r.x_dot) * (dx / r.x_dot);
    py += (dy / r.y) * (dy / r.y);
    mx += std::abs(r.x_dot);
    my += std::abs(r.y);
    e.max_abs_x_dot = std::max(e.max_abs_x_dot, std::abs(dx));
    e.max_abs_y = std::max(e.max_abs_y, std::abs(dy));
    ++e.n;
  }
  if (e.n == 0) return std::nullopt;
  const double n = e.n;
  e.rms_x_dot = std::sqrt(sx / n);
  e.rms_y = std::sqrt(sy / n);
  e.pct_rms_x_dot = std::sqrt(px / n) * 100.0;
  e.pct_rms_y = std::sqrt(py / n) * 100.0;
  e.rel_mean_x_dot = e.rms_x_dot / (mx / n) * 100.0;
  e.rel_mean_y = e.rms_y / (my / n) * 100.0;
  return e;
}

/// Evaluates the grid. Rows of constant p̄ are handed to worker threads; within
/// a row kθ is swept in order so each point can seed from its neighbour.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int np = cfg.p_bar_range.count;
  const int nk = cfg.k_theta_range.count;
  std::vector<std::vector<PointResult>> cells(static_cast<std::size_t>(np * nk));

  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (int i = next_row++; i < np; i = next_row++) {
      std::map<Provenance, ApexState> chain;
      const double p_bar = cfg.p_bar_range.at(i);
      for (int j = 0; j < nk; ++j) {
        auto res = compute_point(cfg, p_bar, cfg.k_theta_range.at(j),
                                 cfg.seed_chaining ? chain : std::map<Provenance, ApexState>{});
        for (const auto& r : res)
          if (r.ok()) chain[r.pipeline] = r.result->apex;
        cells[static_cast<std::size_t>(i * nk + j)] = std::move(res);
      }
    }
  };
  const int n_threads = std::min(cfg.workers, np);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  SweepReport rep;
  rep.config = cfg;
  for (auto& c : cells)
    for (auto& r : c) rep.points.push_back(std::move(r));
  const std::pair<Provenance, Provenance> pairs[] = {
      {Provenance::ClosedForm, Provenance::SimulatorNumeric},
      {Provenance::ClosedForm, Provenance::AnalyticNumeric},
      {Provenance::AnalyticNumeric, Provenance::SimulatorNumeric}};
  for (const auto& [a, b] : pairs)
    if (auto e = pair_error(rep.points, a, b)) rep.errors.push_back(*e);
  rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// =============================================================================
// Writers
// =============================================================================

inline void write_sweep_csv(std::ostream& os, const SweepReport& rep) {
  os << "p_bar,k_theta,pipeline,x_dot_star,y_star,spectral_radius,stable,residual,status\n";
  for (const auto& p : rep.points) {
    os << format_number(p.p_bar) << ',' << format_number(p.k_theta) << ',' << to_string(p.pipeline) << ',';
    if (p.ok()) {
      const auto& r = *p.result;
      os << format_number(r.apex.x_dot) << ',' << format_number(r.apex.y) << ','
         << format_number(r.spectral_radius) << ',' << (r.stable ? "true" : "false") << ','
         << format_number(r.residual) << ",ok\n";
    } else {
      os << ",,,,," << p.status << '\n';
    }
  }
}

inline void write_errors_csv(std::ostream& os, const SweepReport& rep) {
  os << "pred,ref,n,rms_x_dot,rms_y,pct_rms_x_dot,pct_rms_y,rel_mean_x_dot,rel_mean_y,max_abs_x_dot,max_abs_y\n";
  for (const auto& e : rep.errors) {
    os << to_string(e.pred) << ',' << to_string(e.ref) << ',' << e.n << ',' << format_number(e.rms_x_dot) << ','
       << format_number(e.rms_y) << ',' << format_number(e.pct_rms_x_dot) << ',' << format_number(e.pct_rms_y)
       << ',' << format_number(e.rel_mean_x_dot) << ',' << format_number(e.rel_mean_y) << ','
       << format_number(e.max_abs_x_dot) << ',' << format_number(e.max_abs_y) << '\n';
  }
}

inline nlohmann::ordered_json config_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["params"] = {{"m", cfg.params.m}, {"k", cfg.params.k}, {"b", cfg.params.b}, {"r0", cfg.params.r0},
                 {"g", cfg.params.g}};
  j["controls"] = {{"p_bar", cfg.controls.p_bar}, {"k_theta", cfg.controls.k_theta}, {"kp", cfg.controls.kp},
                   {"ki", cfg.controls.ki},       {"kd", cfg.controls.kd}};
  j["controls"]["tau_max"] = cfg.controls.tau_max ? nlohmann::ordered_json(*cfg.controls.tau_max) : nullptr;
  const char* mode = cfg.sim.torque_mode == TorqueMode::ZeroOrderHold ? "zoh"
                     : cfg.sim.torque_mode == TorqueMode::Continuous  ? "continuous"
                                                                      : "off";
  j["sim"] = {{"dt", cfg.sim.dt},
              {"control_period", cfg.sim.control_period},
              {"sample_period", cfg.sim.sample_period},
              {"torque_mode", mode}};
  j["p_bar_range"] = {cfg.p_bar_range.min, cfg.p_bar_range.max, cfg.p_bar_range.count};
  j["k_theta_range"] = {cfg.k_theta_range.min, cfg.k_theta_range.max, cfg.k_theta_range.count};
  auto& pl = j["pipelines"] = nlohmann::ordered_json::array();
  for (Provenance p : cfg.pipelines) pl.push_back(std::string(to_string(p)));
  j["seed_chaining"] = cfg.seed_chaining;
  j["workers"] = cfg.workers;
  j["analytic_tolerance"] = cfg.analytic_tolerance;
  j["simulator_tolerance"] = cfg.simulator_tolerance;
  j["apex_seed"] = {cfg.apex_seed.x_dot, cfg.apex_seed.y};
  j["n_hops"] = cfg.n_hops;
  return j;
}

inline nlohmann::ordered_json report_json(const SweepReport& rep) {
  nlohmann::ordered_json j;
  j["config"] = config_json(rep.config);
  j["points"] = rep.points.size();
  j["converged"] = rep.converged();
  j["failed"] = rep.failed();
  auto& per = j["pipelines"] = nlohmann::ordered_json::object();
  for (Provenance pl : rep.config.pipelines) {
    int conv = 0, fail = 0, stable = 0;
    double max_rho = 0.0;
    std::map<std::string, int> reasons;
    for (const auto& p : rep.points) {
      if (p.pipeline != pl) continue;
      if (p.ok()) {
        ++conv;
        stable += p.result->stable ? 1 : 0;
        max_rho = std::max(max_rho, p.result->spectral_radius);
      } else {
        ++fail;
        ++reasons[p.status];
      }
    }
    per[std::string(to_string(pl))] = {{"converged", conv},
                                       {"failed", fail},
                                       {"stable", stable},
                                       {"max_spectral_radius", max_rho},
                                       {"failure_reasons", reasons}};
  }
  auto& errs = j["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : rep.errors) {
    errs.push_back({{"pred", std::string(to_string(e.pred))},
                    {"ref", std::string(to_string(e.ref))},
                    {"n", e.n},
                    {"rms_x_dot", e.rms_x_dot},
                    {"rms_y", e.rms_y},
                    {"pct_rms_x_dot", e.pct_rms_x_dot},
                    {"pct_rms_y", e.pct_rms_y},
                    {"rel_mean_x_dot", e.rel_mean_x_dot},
                    {"rel_mean_y", e.rel_mean_y},
                    {"max_abs_x_dot", e.max_abs_x_dot},
                    {"max_abs_y", e.max_abs_y}});
  }
  auto& fails = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& p : rep.points) {
    if (p.ok()) continue;
    fails.push_back({{"p_bar", p.p_bar},
                     {"k_theta", p.k_theta},
                     {"pipeline", std::string(to_string(p.pipeline))},
                     {"status", p.status},
                     {"message", p.message}});
  }
  j["elapsed_seconds"] = rep.elapsed_seconds;
  return j;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace detail

inline void write_sweep_outputs(const SweepReport& rep, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  auto csv = detail::open_output(dir / "sweep.csv");
  write_sweep_csv(csv, rep);
  auto err = detail::open_output(dir / "errors.csv");
  write_errors_csv(err, rep);
  auto js = detail::open_output(dir / "report.json");
  js << report_json(rep).dump(2) << '\n';
}

// =============================================================================
// Multi-hop run
// =============================================================================

struct HopSummary {
  int hop = 0;
  double x_dot = 0.0;  // apex the hop started from
  double y = 0.0;
  double p_theta_lo = 0.0;
  double theta_td = 0.0;
  double theta_lo = 0.0;
  double k_theta = 0.0;
  double radial_energy_td = 0.0;  // ½·m·ṙ_td², energy entering the leg spring
};

struct HopFailure {
  int hop = 0;
  std::string status;
  std::string message;
};

struct SingleRun {
  ApexState seed;
  std::vector<HopSummary> hops;
  std::vector<ApexState> apexes;  // seed followed by every apex reached
  HybridTrajectory trajectory;
  std::optional<HopFailure> failure;
};

/// Chains the simulator return map for cfg.n_hops hops, stopping at the first
/// gait failure. With seed_from_fixed_point the run starts at the simulator
/// fixed point for cfg.controls.
inline SingleRun run_single(const SweepConfig& cfg) {
  cfg.validate();
  SingleRun run;
  ControlInputs in = cfg.controls;
  run.seed = cfg.apex_seed;
  if (cfg.seed_from_fixed_point) {
    SweepConfig one = cfg;
    one.pipelines = {Provenance::SimulatorNumeric};
    const PointResult fp = compute_point(one, in.p_bar, in.k_theta).front();
    if (!fp.ok()) {
      run.failure = HopFailure{0, fp.status, "no fixed point to seed from: " + fp.message};
      return run;
    }
    run.seed = fp.result->apex;
  }
  SimOptions opt = cfg.sim;
  opt.record = true;
  ApexState z = run.seed;
  run.apexes.push_back(z);
  double t = 0.0, x = 0.0;
  for (int h = 0; h < cfg.n_hops; ++h) {
    if (cfg.k_theta_step_hop && h >= *cfg.k_theta_step_hop) in.k_theta = cfg.k_theta_step_value;
    NumericHop hop;
    try {
      hop = return_map_numeric(z, in, cfg.params, opt, t, x);
    } catch (const GaitError& e) {
      run.failure = HopFailure{h, detail::failure_status(e), e.detail()};
      break;
    }
    run.hops.push_back({h, z.x_dot, z.y, hop.liftoff_momentum, hop.touchdown.theta, hop.liftoff.theta, in.k_theta,
                        0.5 * cfg.params.m * hop.touchdown.r_dot * hop.touchdown.r_dot});
    run.trajectory.append(hop.trajectory);
    t += hop.hop_duration;
    x += hop.horizontal_advance;
    z = hop.next;
    run.apexes.push_back(z);
  }
  run.trajectory.events.push_back({EventKind::Apex, t});
  return run;
}

inline void write_apex_csv(std::ostream& os, const SingleRun& run) {
  os << "hop,x_dot,y,p_theta_lo,theta_td,theta_lo,k_theta,radial_energy_td\n";
  for (const auto& h : run.hops) {
    os << h.hop << ',' << format_number(h.x_dot) << ',' << format_number(h.y) << ','
       << format_number(h.p_theta_lo) << ',' << format_number(h.theta_td) << ',' << format_number(h.theta_lo)
       << ',' << format_number(h.k_theta) << ',' << format_number(h.radial_energy_td) << '\n';
  }
}

inline nlohmann::ordered_json single_json(const SweepConfig& cfg, const SingleRun& run) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["seed"] = {run.seed.x_dot, run.seed.y};
  j["hops_completed"] = run.hops.size();
  j["final_apex"] = {run.apexes.back().x_dot, run.apexes.back().y};
  auto& ev = j["events"] = nlohmann::ordered_json::array();
  for (const auto& e : run.trajectory.events) ev.push_back({{"kind", std::string(to_string(e.kind))}, {"t", e.t}});
  if (run.failure) {
    j["failure"] = {{"hop", run.failure->hop}, {"status", run.failure->status}, {"message", run.failure->message}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

inline void write_single_outputs(const SweepConfig& cfg, const SingleRun& run, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  auto traj = detail::open_output(dir / "trajectory.csv");
  write_trajectory_csv(traj, run.trajectory);
  auto apex = detail::open_output(dir / "apex.csv");
  write_apex_csv(apex, run);
  auto js = detail::open_output(dir / "report.json");
  js << single_json(cfg, run).dump(2) << '\n';
}

}  // namespace slip
