#include "twophase/godunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "twophase/error.hpp"
#include "twophase/riemann.hpp"

namespace twophase {

namespace {

constexpr double kClampTol = 1e-9;

std::string describe_cell(const SimState& s, std::size_t j, const State& u) {
  std::ostringstream os;
  os.precision(12);
  os << "cell " << j << " (x=" << s.grid.center(j) << ", t=" << s.t << "): rho=" << u.rho
     << ", eta=" << u.eta;
  return os.str();
}

void compute_fluxes(const std::vector<State>& padded, const ModelParams& p,
                    std::vector<NumericalFlux>& fluxes, unsigned workers) {
  const std::size_t n_if = fluxes.size();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      fluxes[i] = godunov_flux(padded[i], padded[i + 1], p);
    }
  };
  if (workers <= 1 || n_if < 2 * workers) {
    work(0, n_if);
    return;
  }
  // Each interface is independent, so the split does not affect the result.
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n_if + workers - 1) / workers;
  for (unsigned k = 0; k < workers; ++k) {
    const std::size_t begin = k * chunk;
    const std::size_t end = std::min(n_if, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, k, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void Grid::validate() const {
  if (n_cells < 2) fail(ErrorKind::InvalidArgument, "grid needs at least 2 cells");
  if (!(x_max > x_min) || !std::isfinite(x_max - x_min)) {
    fail(ErrorKind::InvalidArgument, "grid needs x_max > x_min");
  }
}

SimState init_from_profiles(const Grid& grid, const Profile& rho0, const Profile& w0,
                            const ModelParams& p, BoundaryCondition bc) {
  grid.validate();
  SimState s;
  s.grid = grid;
  s.params = p;
  s.bc = bc;
  s.cells.resize(grid.n_cells);
  for (std::size_t j = 0; j < grid.n_cells; ++j) {
    const double x = grid.center(j);
    const double rho = rho0(x);
    const double w = w0(x);
    if (!std::isfinite(rho) || rho < 0.0 || rho > p.R * (1 + 1e-12)) {
      std::ostringstream os;
      os << "initial density " << rho << " at x=" << x << " is outside [0, R]";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    const bool w_ok = w == 0.0 || (w >= p.w_min * (1 - 1e-12) && w <= p.w_max * (1 + 1e-12));
    if (!std::isfinite(w) || !w_ok) {
      std::ostringstream os;
      os << "initial w " << w << " at x=" << x << " is outside {0} U [w_min, w_max]";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    if (rho <= p.vacuum_density()) {
      s.cells[j] = {0.0, 0.0};
      continue;
    }
    if (w == 0.0) {
      std::ostringstream os;
      os << "w = 0 at x=" << x << " is only allowed where rho = 0";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    s.cells[j] = {std::min(rho, p.R), rho * std::clamp(w, p.w_min, p.w_max)};
  }
  return s;
}

double max_wave_speed_bound(const ModelParams& p) {
  return std::max(p.v_max, p.w_max * max_abs_flux_slope(p.psi));
}

double max_cell_wave_speed(const SimState& s) {
  const ModelParams& p = s.params;
  double best = 0.0;
  for (const State& u : s.cells) {
    if (is_vacuum(u, p)) continue;
    if (in_congested(u, p)) {
      best = std::max({best, std::abs(lambda1(u, p)), velocity(u, p)});
    } else {
      best = std::max(best, p.v_max);
    }
  }
  return best;
}

double stable_dt(const SimState& s, const CflPolicy& policy) {
  if (!(policy.courant > 0.0 && policy.courant <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "Courant number must lie in (0, 1]");
  }
  const double dx = s.grid.dx();
  if (policy.mode == CflMode::FixedVmax) return policy.courant * dx / s.params.v_max;
  return policy.courant * dx / max_wave_speed_bound(s.params);
}

StepStats step(SimState& s, double dt, const StepOptions& opts) {
  const ModelParams& p = s.params;
  const std::size_t n = s.cells.size();
  const double dx = s.grid.dx();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    fail(ErrorKind::InvalidArgument, "time step must be positive and finite");
  }
  if (opts.check_cfl) {
    const double speed = max_cell_wave_speed(s);
    if (dt * speed > dx * (1 + 1e-12)) {
      std::ostringstream os;
      os << "CFL condition violated: dt*S = " << dt * speed << " > dx = " << dx;
      fail(ErrorKind::Numerical, os.str());
    }
  }

  std::vector<State> padded(n + 2);
  std::copy(s.cells.begin(), s.cells.end(), padded.begin() + 1);
  switch (s.bc.kind) {
    case BoundaryKind::Outflow:
      padded.front() = s.cells.front();
      padded.back() = s.cells.back();
      break;
    case BoundaryKind::Periodic:
      padded.front() = s.cells.back();
      padded.back() = s.cells.front();
      break;
    case BoundaryKind::Dirichlet:
      padded.front() = s.bc.left;
      padded.back() = s.bc.right;
      break;
  }

  std::vector<NumericalFlux> fluxes(n + 1);
  compute_fluxes(padded, p, fluxes, opts.workers);

  const double nu = dt / dx;
  std::vector<State> next(n);
  StepStats stats;
  for (std::size_t j = 0; j < n; ++j) {
    State u{s.cells[j].rho - nu * (fluxes[j + 1].rho - fluxes[j].rho),
            s.cells[j].eta - nu * (fluxes[j + 1].eta - fluxes[j].eta)};
    if (!std::isfinite(u.rho) || !std::isfinite(u.eta)) {
      fail(ErrorKind::Numerical, "non-finite value in " + describe_cell(s, j, u));
    }
    const double rho_excess = std::max(-u.rho, u.rho - p.R) / p.R;
    if (rho_excess > 0.0) {
      if (rho_excess > kClampTol) {
        fail(ErrorKind::Numerical, "density left [0, R] in " + describe_cell(s, j, u));
      }
      stats.rho_violation = std::max(stats.rho_violation, rho_excess);
    }
    const double rho = std::clamp(u.rho, 0.0, p.R);
    const double eta = std::clamp(u.eta, rho * p.w_min, rho * p.w_max);
    const double eta_excess = std::abs(u.eta - eta);
    if (eta_excess > 0.0) {
      // Tolerance in eta units: near vacuum, w = eta/rho is dominated by rounding.
      if (eta_excess > kClampTol * p.R * p.w_max) {
        fail(ErrorKind::Numerical, "w left [w_min, w_max] in " + describe_cell(s, j, u));
      }
      if (rho > p.vacuum_density()) {
        stats.w_violation = std::max(stats.w_violation, eta_excess / (rho * p.w_max));
      }
    }
    next[j] = {rho, eta};
  }
  s.cells = std::move(next);
  s.t += dt;
  return stats;
}

RunStats run(SimState& s, double t_final, const RunOptions& opts, const SnapshotSink& sink) {
  if (!(t_final >= s.t)) fail(ErrorKind::InvalidArgument, "final time precedes current time");
  if (opts.snapshot_every < 0.0) {
    fail(ErrorKind::InvalidArgument, "snapshot interval must be nonnegative");
  }
  RunStats stats;
  const double t0 = s.t;
  if (sink) sink(s.t, s.cells);
  if (t_final == t0) return stats;

  const double dt = stable_dt(s, opts.cfl);
  const StepOptions step_opts{opts.cfl.mode == CflMode::Safe, opts.workers};
  const double every = opts.snapshot_every;
  const double eps = 1e-9 * (every > 0.0 ? every : 1.0);
  std::size_t next_k = 1;

  while (true) {
    const bool last = t_final - s.t <= dt;
    const StepStats st = step(s, last ? t_final - s.t : dt, step_opts);
    ++stats.steps;
    stats.rho_violation = std::max(stats.rho_violation, st.rho_violation);
    stats.w_violation = std::max(stats.w_violation, st.w_violation);
    if (last) {
      s.t = t_final;
      if (sink) sink(s.t, s.cells);
      break;
    }
    if (every > 0.0) {
      const double due = t0 + static_cast<double>(next_k) * every;
      if (s.t >= due - eps) {
        if (due < t_final - eps && sink) sink(s.t, s.cells);
        while (t0 + static_cast<double>(next_k) * every <= s.t + eps) ++next_k;
      }
    }
  }
  return stats;
}

std::vector<Snapshot> run(SimState& s, double t_final, const RunOptions& opts) {
  std::vector<Snapshot> out;
  run(s, t_final, opts,
      [&](double t, const std::vector<State>& cells) { out.push_back({t, cells}); });
  return out;
}

}  // namespace twophase
