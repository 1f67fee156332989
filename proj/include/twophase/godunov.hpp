#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "twophase/model.hpp"

namespace twophase {

struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_cells = 2;

  double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
  double center(std::size_t j) const { return x_min + (static_cast<double>(j) + 0.5) * dx(); }
  /// Throws InvalidArgument unless n_cells >= 2 and dx > 0.
  void validate() const;
};

enum class BoundaryKind { Outflow, Periodic, Dirichlet };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Outflow;
  State left{};   // Dirichlet only
  State right{};  // Dirichlet only
};

struct SimState {
  double t = 0.0;
  Grid grid;
  std::vector<State> cells;
  ModelParams params;
  BoundaryCondition bc;
};

enum class CflMode {
  Safe,        // dt = c dx / S_max with S_max bounding every wave speed
  FixedVmax,  // dt = c dx / V_max
};

struct CflPolicy {
  CflMode mode = CflMode::Safe;
  double courant = 0.9;
};

using Profile = std::function<double(double)>;

/// Point samples of rho0 and w0 at the cell centers. Cells at or below the
/// vacuum density become (0, 0); w0 = 0 is only accepted there.
SimState init_from_profiles(const Grid& grid, const Profile& rho0, const Profile& w0,
                            const ModelParams& p, BoundaryCondition bc = {});

/// Global bound on wave speeds used by the Safe policy: max(V_max, w_max * sup|(rho psi)'|).
double max_wave_speed_bound(const ModelParams& p);

/// Largest characteristic speed present in the current cells.
double max_cell_wave_speed(const SimState& s);

double stable_dt(const SimState& s, const CflPolicy& policy);

struct StepOptions {
  bool check_cfl = true;
  unsigned workers = 1;
};

struct StepStats {
  // Largest pre-clamp excursions, as fractions of R and of w_max.
  double rho_violation = 0.0;
  double w_violation = 0.0;
};

/// One conservative Godunov update. Cells are modified in place; on error
/// (NaN, instability, CFL breach) the state is left untouched.
StepStats step(SimState& s, double dt, const StepOptions& opts = {});

struct Snapshot {
  double t;
  std::vector<State> cells;
};

struct RunOptions {
  CflPolicy cfl;
  double snapshot_every = 1.0;
  unsigned workers = 1;
};

struct RunStats {
  std::size_t steps = 0;
  double rho_violation = 0.0;
  double w_violation = 0.0;
};

using SnapshotSink = std::function<void(double t, const std::vector<State>& cells)>;

/// Advances to t_final, landing on it exactly. `sink` receives t = start,
/// the first completed step at or past each multiple of snapshot_every, and t_final.
RunStats run(SimState& s, double t_final, const RunOptions& opts, const SnapshotSink& sink);

std::vector<Snapshot> run(SimState& s, double t_final, const RunOptions& opts);

}  // namespace twophase
