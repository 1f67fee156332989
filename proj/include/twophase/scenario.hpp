#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twophase/godunov.hpp"
#include "twophase/model.hpp"

namespace twophase::scenario {

constexpr double kKmhToMs = 1.0 / 3.6;

/// Breakpoint table evaluated by linear interpolation, constant outside its
/// range. A repeated abscissa encodes a jump; the function takes the first
/// value at the jump itself (left-continuous).
struct PiecewiseLinear {
  std::vector<std::pair<double, double>> points;

  double operator()(double x) const;
  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;
};

/// All speeds are in km/h and lengths in meters, as written in config files.
struct ScenarioConfig {
  std::string name;

  // [model]
  double R = 1.0;
  double v_max = 60.0;
  double w_min = 120.0;
  double w_max = 140.0;
  std::string psi = "linear";

  // [grid]
  double x_min = 0.0;
  double x_max = 3000.0;
  std::size_t n_cells = 3000;
  BoundaryKind bc = BoundaryKind::Outflow;
  double bc_left_rho = 0.0, bc_left_w = 0.0;
  double bc_right_rho = 0.0, bc_right_w = 0.0;

  // [numerics]
  CflMode cfl_mode = CflMode::Safe;
  double courant = 0.9;
  double t_final = 300.0;
  double snapshot_every = 1.0;
  unsigned workers = 1;

  // [initial]
  std::string builtin;  // informational once the tables are filled in
  PiecewiseLinear rho0;
  PiecewiseLinear w0;

  // [output]
  std::string out_dir = ".";
  bool plot_script = true;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// es1, es2 or es3: the traffic-light experiments on (0, 3000) m.
ScenarioConfig builtin_scenario(std::string_view name);

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);
std::string emit_config(const ScenarioConfig& cfg);

enum class Units { SI, KmH };

/// Model constants converted to m/s (SI) or left in km/h.
ModelParams model_params(const ScenarioConfig& cfg, Units units = Units::SI);

/// Parameter hypotheses plus structural checks on grid, numerics and profiles.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

SimState initial_state(const ScenarioConfig& cfg);
RunOptions run_options(const ScenarioConfig& cfg);

struct RunSummary {
  RunStats stats;
  std::size_t snapshots = 0;
  double wall_seconds = 0.0;
  double min_w = 0.0;  // km/h, over non-vacuum cells of all snapshots
  double max_w = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
};

/// Runs the scenario and writes fields.csv, summary.txt and (optionally)
/// plot.gp into cfg.out_dir, which must already exist. fields.csv is
/// written under a temporary name and only renamed into place on success.
RunSummary run_scenario(const ScenarioConfig& cfg);

}  // namespace twophase::scenario
