// Copyright 2026 The pqs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pqs/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "json.hpp"
#include "pqs/deterministic.hpp"
#include "pqs/ensemble.hpp"
#include "pqs/errors.hpp"
#include "pqs/geometry.hpp"
#include "pqs/measurement.hpp"
#include "pqs/record_io.hpp"
#include "pqs/rng.hpp"
#include "pqs/trajectory.hpp"

namespace pqs::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Command-line defaults: the experimental parameters, with the per-angle
// post-selection fidelity at its typical value.
constexpr double kDefaultEtaP = 0.95;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kCsv, kJson };

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return io::format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return io::format_double(*d);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::kCsv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << '\n';
    }
    return;
  }
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  os << rows.dump(2) << '\n';
}

std::string extension(Format f) { return f == Format::kCsv ? ".csv" : ".json"; }

// Options every subcommand shares.
struct Common {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "csv";
  unsigned threads = 0;
  std::string config_path;

  Format fmt() const { return format == "json" ? Format::kJson : Format::kCsv; }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out-dir", c.out_dir, "Write outputs into this directory instead of stdout");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)");
  sub->add_option("--config", c.config_path, "JSON config file (schema 1)");
}

bool given(const CLI::App* sub, const char* name) { return sub->count(name) > 0; }

// Config values apply unless the same setting was given on the command line.
template <typename T>
void apply(const CLI::App* sub, const char* flag, const std::optional<T>& from_config, T& target) {
  if (from_config && !given(sub, flag)) target = *from_config;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

// Writes to <out-dir>/<stem><ext>, or to `out` without --out-dir.
void emit(const Common& c, const std::string& stem, std::ostream& out,
          const std::function<void(std::ostream&)>& body) {
  if (c.out_dir.empty()) {
    body(out);
    return;
  }
  const fs::path path = prepare_out_dir(c.out_dir) / (stem + extension(c.fmt()));
  std::ofstream os = open_out(path);
  body(os);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

struct ParamFlags {
  SimParams p;
  ParamFlags() { p.eta_p = kDefaultEtaP; }
};

void add_param_flags(CLI::App* sub, ParamFlags& f, bool with_T) {
  sub->add_option("--gamma", f.p.gamma, "Decay rate, 1/us");
  sub->add_option("--eta", f.p.eta, "Detector efficiency");
  sub->add_option("--dt", f.p.dt, "Time step, us");
  if (with_T) sub->add_option("--T", f.p.T, "Record horizon, us");
  sub->add_option("--eta-p", f.p.eta_p, "Post-selection fidelity");
}

void apply_param_config(const CLI::App* sub, const ConfigFile& cf, SimParams& p) {
  apply(sub, "--gamma", cf.gamma, p.gamma);
  apply(sub, "--eta", cf.eta, p.eta);
  apply(sub, "--dt", cf.dt, p.dt);
  apply(sub, "--T", cf.T, p.T);
  apply(sub, "--eta-p", cf.eta_p, p.eta_p);
}

void apply_common_config(const CLI::App* sub, const ConfigFile& cf, Common& c) {
  apply(sub, "--seed", cf.seed, c.seed);
  apply(sub, "--threads", cf.threads, c.threads);
}

ConfigFile config_of(const Common& c) {
  if (c.config_path.empty()) return {};
  return load_config(c.config_path);
}

// ---------------------------------------------------------------- classical

struct ClassicalArgs {
  double gamma = 1.628;
  double T = 1.68;
  int steps = 200;
};

void run_classical(const ClassicalArgs& a, const Common& c, const CLI::App* sub, std::ostream& out) {
  ClassicalArgs args = a;
  const ConfigFile cf = config_of(c);
  apply(sub, "--gamma", cf.gamma, args.gamma);
  apply(sub, "--T", cf.T, args.T);
  if (args.steps < 2) throw UsageError("--steps must be at least 2");
  if (!(args.gamma > 0.0) || !(args.T >= 0.0)) throw UsageError("--gamma must be positive, --T non-negative");

  Table t{{"t_us", "P_e", "P_e_given_e", "P_e_given_g"}, {}};
  for (int k = 0; k < args.steps; ++k) {
    // Pin the last grid point to T exactly.
    const double time = k == args.steps - 1 ? args.T : args.T * k / (args.steps - 1);
    const auto d = deterministic::classical_decay(args.gamma, time, args.T);
    t.rows.push_back({time, d.unconditioned, d.given_excited_final, d.given_ground_final});
  }
  emit(c, "classical", out, [&](std::ostream& os) { write_table(os, t, c.fmt()); });
}

// ---------------------------------------------------------------- weakvalue

struct WeakValueArgs {
  ParamFlags params;
  double delay = 0.5;
  int divisions = 8;  // theta grid step pi / (divisions / 2)
  std::size_t monte_carlo = 0;
  int window = 3;
  int substeps = 1;
};

void run_weakvalue(const WeakValueArgs& a, Common c, const CLI::App* sub, std::ostream& out) {
  WeakValueArgs args = a;
  const ConfigFile cf = config_of(c);
  apply_param_config(sub, cf, args.params.p);
  apply_common_config(sub, cf, c);
  apply(sub, "--delay", cf.postselect_delay, args.delay);
  apply(sub, "--window", cf.integration_window, args.window);
  apply(sub, "--substeps", cf.substeps, args.substeps);
  if (args.divisions < 1) throw UsageError("--divisions must be positive");

  SimParams p = args.params.p;
  p.T = args.delay;
  p.validate();

  Table t{{"theta", "V_pred", "V_retro", "threshold", "anomalous"}, {}};
  if (args.monte_carlo > 0) {
    t.columns.insert(t.columns.end(), {"V_mc", "V_mc_stderr", "n_accepted"});
  }
  const double threshold = p.signal_bound();
  for (int k = 0; k <= args.divisions; ++k) {
    const double theta = -kPi + 2.0 * kPi * k / args.divisions;
    const QubitOperator rho0 = from_theta(theta);
    const double v_pred = measurement::predicted_mean_signal(rho0, p);
    const QubitOperator effect0 = normalized(deterministic::effect_unmonitored(
        measurement::corrected_effect(theta, p.eta_p), 0.0, args.delay, p.gamma));
    const double v_retro = measurement::retrodicted_mean_signal(rho0, effect0, p);
    std::vector<Cell> row{theta, v_pred, v_retro, threshold, std::abs(v_retro) > threshold};
    if (args.monte_carlo > 0) {
      ensemble::ExperimentConfig cfg;
      cfg.params = p;
      cfg.theta_prepare = theta;
      cfg.theta_postselect = theta - kPi / 2;
      cfg.n_trajectories = args.monte_carlo;
      cfg.integration_window = args.window;
      cfg.postselect_delay = args.delay;
      cfg.seed = c.seed + static_cast<std::uint64_t>(k);
      cfg.substeps = args.substeps;
      cfg.threads = c.threads;
      try {
        const auto est = ensemble::conditional_mean_signal(cfg);
        row.insert(row.end(), {est.mean, est.std_error, static_cast<std::int64_t>(est.n_accepted)});
      } catch (const EmptySelection&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.insert(row.end(), {nan, nan, std::int64_t{0}});
      }
    }
    t.rows.push_back(std::move(row));
  }
  emit(c, "weakvalue", out, [&](std::ostream& os) { write_table(os, t, c.fmt()); });
}

// --------------------------------------------------------------- trajectory

struct TrajectoryArgs {
  ParamFlags params;
  double theta_prepare = kPi;
  double theta_postselect = kPi / 2;
  bool no_postselect = false;
  std::vector<double> snapshots;
  std::size_t n_trajectories = 0;
  int substeps = 1;
  int grid_n = 128;
  std::string record;
};

void run_trajectory(const TrajectoryArgs& a, Common c, const CLI::App* sub) {
  TrajectoryArgs args = a;
  const ConfigFile cf = config_of(c);
  apply_param_config(sub, cf, args.params.p);
  apply_common_config(sub, cf, c);
  apply(sub, "--theta-prepare", cf.theta_prepare, args.theta_prepare);
  if (cf.theta_postselect && !given(sub, "--theta-postselect") && !given(sub, "--no-postselect")) {
    args.no_postselect = !cf.theta_postselect->has_value();
    if (*cf.theta_postselect) args.theta_postselect = **cf.theta_postselect;
  }
  apply(sub, "--snapshots", cf.snapshot_times, args.snapshots);
  apply(sub, "--n-trajectories", cf.n_trajectories, args.n_trajectories);
  apply(sub, "--substeps", cf.substeps, args.substeps);
  apply(sub, "--grid-n", cf.grid_n, args.grid_n);
  apply(sub, "--record", cf.record, args.record);
  if (c.out_dir.empty()) c.out_dir = ".";
  const fs::path dir = prepare_out_dir(c.out_dir);

  const QubitOperator rho0 = from_theta(args.theta_prepare);
  ensemble::ExperimentConfig cfg;
  cfg.params = args.params.p;
  cfg.theta_prepare = args.theta_prepare;
  if (!args.no_postselect) cfg.theta_postselect = args.theta_postselect;
  const QubitOperator effect_T = ensemble::analysis_effect(cfg);

  trajectory::HomodyneRecord record;
  if (!args.record.empty()) {
    try {
      record = io::load_record(args.record);
    } catch (const InvalidParams& e) {
      throw std::runtime_error(args.record + ": " + e.what());
    }
    const double eta_p = cfg.params.eta_p;
    cfg.params = record.params;
    cfg.params.eta_p = eta_p;
  } else {
    cfg.params.validate();
    record = trajectory::generate_record(rho0, cfg.params, c.seed).record;
  }
  const SimParams& p = cfg.params;
  if (args.snapshots.empty()) {
    // Default: the end points of [0.42 n, 0.42 (n + 1)] us windows up to T.
    for (int n = 1; 0.42 * n <= p.T + 1e-12; ++n) args.snapshots.push_back(0.42 * n);
  }
  cfg.snapshot_times = args.snapshots;
  cfg.validate();

  io::save_record(dir / "record.csv", record);

  const auto pairs = trajectory::smooth_record(record, rho0, effect_T);
  Table pp{{"t_us", "x_rho", "z_rho", "x_E", "z_E", "x_p", "z_p", "alpha", "beta"}, {}};
  for (const auto& q : pairs) {
    pp.rows.push_back({q.t, q.rho_bloch.x, q.rho_bloch.z, q.effect_bloch.x, q.effect_bloch.z,
                       q.retro.x, q.retro.z, geometry::rho_ellipse_of(q.rho_bloch).value,
                       geometry::effect_ellipse_of(q.effect_bloch).value});
  }
  {
    std::ofstream os = open_out(dir / ("pastpairs" + extension(c.fmt())));
    write_table(os, pp, c.fmt());
  }

  const double alpha0 = geometry::rho_ellipse_of(to_bloch(rho0)).value;
  const double betaT = geometry::effect_ellipse_of(to_bloch(normalized(effect_T))).value;
  Table el{{"t_us", "alpha", "beta", "rho_center_z", "rho_semi_x", "rho_semi_z", "effect_center_z",
            "effect_semi_x", "effect_semi_z", "region_skipped"},
           {}};
  for (std::size_t s = 0; s < args.snapshots.size(); ++s) {
    const double t = args.snapshots[s];
    const auto re = geometry::EllipseParam::rho(geometry::alpha_at_time(alpha0, t, p));
    const auto ee = geometry::EllipseParam::effect(geometry::beta_at_time(betaT, t, p.T, p));
    const auto region = geometry::retrodiction_region(re.value, ee.value, args.grid_n);
    {
      std::ofstream os = open_out(dir / ("region_" + std::to_string(s) + ".csv"));
      geometry::write_polygon_csv(os, region.outer());
    }
    el.rows.push_back({t, re.value, ee.value, re.center_z(), re.semi_x(), re.semi_z(), ee.center_z(),
                       ee.semi_x(), ee.semi_z(), static_cast<std::int64_t>(region.skipped)});
  }
  {
    std::ofstream os = open_out(dir / ("ellipses" + extension(c.fmt())));
    write_table(os, el, c.fmt());
  }

  if (args.n_trajectories > 0) {
    cfg.n_trajectories = args.n_trajectories;
    cfg.seed = c.seed;
    cfg.substeps = args.substeps;
    cfg.threads = c.threads;
    const auto stats = ensemble::bloch_histograms(cfg);
    {
      std::ofstream os = open_out(dir / "ensemble.json");
      ensemble::write_stats_json(os, stats);
    }
    for (std::size_t s = 0; s < stats.snapshots.size(); ++s) {
      for (std::size_t q = 0; q < ensemble::kQuantityCount; ++q) {
        const auto name = "hist_" + std::to_string(s) + "_" + std::string(ensemble::quantity_name(q));
        std::ofstream os = open_out(dir / (name + ".csv"));
        ensemble::write_histogram_csv(os, stats.snapshots[s].histograms[q]);
      }
    }
  }
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  ParamFlags params;
  std::size_t samples = 500000;
};

std::vector<measurement::SignalSample> sample_signal(double theta, std::size_t n, const SimParams& p,
                                                     Rng rng) {
  const trajectory::ForwardFilter filter(from_theta(theta), p);
  const double mean = filter.predicted_signal();
  std::normal_distribution<double> noise(0.0, std::sqrt(p.gamma * p.dt));
  std::vector<measurement::SignalSample> out(n);
  for (auto& s : out) s.V = mean + noise(rng);
  return out;
}

void run_calibrate(const CalibrateArgs& a, Common c, const CLI::App* sub, std::ostream& out) {
  CalibrateArgs args = a;
  const ConfigFile cf = config_of(c);
  apply_param_config(sub, cf, args.params.p);
  apply_common_config(sub, cf, c);
  const SimParams& p = args.params.p;
  p.validate();

  const auto plus = sample_signal(kPi / 2, args.samples, p, make_stream(c.seed, 0));
  const auto minus = sample_signal(-kPi / 2, args.samples, p, make_stream(c.seed, 1));
  const double spread = 6.0 * std::sqrt(p.gamma_dt()) + 2.0 * p.signal_bound();
  const double width = std::sqrt(p.gamma_dt()) / 20.0;
  const double half = width * std::ceil(spread / width);
  Histogram hp(-half, half, static_cast<std::size_t>(std::llround(2.0 * half / width)));
  Histogram hm = hp;
  for (const auto& s : plus) hp.add(s.V);
  for (const auto& s : minus) hm.add(s.V);

  ordered_json j;
  j["samples_per_preparation"] = args.samples;
  j["gamma_per_us"] = p.gamma;
  j["dt_us"] = p.dt;
  j["eta_true"] = p.eta;
  try {
    const auto est = measurement::estimate_efficiency(plus, minus, p);
    j["eta_hat"] = est.eta_hat;
    j["eta_std_error"] = est.eta_std_error;
    j["mean_plus"] = est.mean_plus;
    j["mean_minus"] = est.mean_minus;
    j["delta_v"] = est.delta_v;
    j["delta_v_std_error"] = est.delta_v_std_error;
  } catch (const EstimationFailed& e) {
    j["eta_hat"] = nullptr;
    j["estimation_failed"] = e.what();
  }

  Table hist{{"bin_center", "count_plus", "count_minus"}, {}};
  for (std::size_t i = 0; i < hp.bins(); ++i) {
    hist.rows.push_back({hp.center(i), static_cast<std::int64_t>(hp.counts()[i]),
                         static_cast<std::int64_t>(hm.counts()[i])});
  }

  if (c.fmt() == Format::kJson) {
    ordered_json h;
    h["bin_center"] = ordered_json::array();
    h["count_plus"] = hp.counts();
    h["count_minus"] = hm.counts();
    for (std::size_t i = 0; i < hp.bins(); ++i) h["bin_center"].push_back(hp.center(i));
    j["histograms"] = std::move(h);
    emit(c, "calibrate", out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return;
  }
  // CSV: the estimate as JSON next to the histogram table.
  if (c.out_dir.empty()) {
    write_table(out, hist, Format::kCsv);
    out << "# " << j.dump() << '\n';
    return;
  }
  const fs::path dir = prepare_out_dir(c.out_dir);
  {
    std::ofstream os = open_out(dir / "calibrate_histograms.csv");
    write_table(os, hist, Format::kCsv);
  }
  std::ofstream os = open_out(dir / "calibrate.json");
  os << j.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Past quantum state analysis of monitored qubit decay", "pqs"};
  app.require_subcommand(1);

  Common c_classical, c_weak, c_traj, c_cal;

  ClassicalArgs classical;
  auto* s_classical = app.add_subcommand("classical", "Classical conditional decay probabilities");
  add_common(s_classical, c_classical);
  s_classical->add_option("--gamma", classical.gamma, "Decay rate, 1/us");
  s_classical->add_option("--T", classical.T, "Post-selection time, us");
  s_classical->add_option("--steps", classical.steps, "Number of time points");

  WeakValueArgs weak;
  auto* s_weak = app.add_subcommand("weakvalue", "Predicted and retrodicted mean signal vs theta");
  add_common(s_weak, c_weak);
  add_param_flags(s_weak, weak.params, false);
  s_weak->add_option("--delay", weak.delay, "Post-selection delay, us");
  s_weak->add_option("--divisions", weak.divisions, "Theta grid points per 2 pi");
  s_weak->add_option("--monte-carlo", weak.monte_carlo, "Trajectories per angle (0: theory only)");
  s_weak->add_option("--window", weak.window, "Signal samples averaged from t = 0");
  s_weak->add_option("--substeps", weak.substeps, "Integration substeps per sample");

  TrajectoryArgs traj;
  auto* s_traj = app.add_subcommand("trajectory", "Record, smoothing, ellipses, regions, histograms");
  add_common(s_traj, c_traj);
  add_param_flags(s_traj, traj.params, true);
  s_traj->add_option("--theta-prepare", traj.theta_prepare, "Preparation angle");
  s_traj->add_option("--theta-postselect", traj.theta_postselect, "Post-selection projector angle");
  s_traj->add_flag("--no-postselect", traj.no_postselect, "Use E_T = identity / 2");
  s_traj->add_option("--snapshots", traj.snapshots, "Snapshot times, us");
  s_traj->add_option("--n-trajectories", traj.n_trajectories, "Ensemble size for histograms");
  s_traj->add_option("--substeps", traj.substeps, "Integration substeps per sample");
  s_traj->add_option("--grid-n", traj.grid_n, "Region sweep angles per ellipse");
  s_traj->add_option("--record", traj.record, "Replay this record CSV instead of generating one");

  CalibrateArgs cal;
  auto* s_cal = app.add_subcommand("calibrate", "Efficiency estimate from +x / -x signal histograms");
  add_common(s_cal, c_cal);
  add_param_flags(s_cal, cal.params, false);
  s_cal->add_option("--samples", cal.samples, "Samples per preparation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s_classical) run_classical(classical, c_classical, s_classical, out);
    if (*s_weak) run_weakvalue(weak, c_weak, s_weak, out);
    if (*s_traj) run_trajectory(traj, c_traj, s_traj);
    if (*s_cal) run_calibrate(cal, c_cal, s_cal, out);
  } catch (const UsageError& e) {
    err << "pqs: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "pqs: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "pqs: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "pqs: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace pqs::cli
