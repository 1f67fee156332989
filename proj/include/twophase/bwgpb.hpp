#pragma once

#include <string>
#include <vector>

#include "twophase/model.hpp"
#include "twophase/riemann.hpp"

// Riemann-level implementation of the competing phase-transition model with a
// one-dimensional free phase (rho, q) and a two-dimensional congested phase.
namespace twophase::bwgpb {

struct Params {
  double R = 1.0;
  double V = 60.0;
  double sigma = 0.5;
  double sigma_plus = 0.55;
  double q_minus = 0.1;
  double q_plus = 1.0;

  /// Prefactor V sigma / (R - sigma) of the equilibrium velocity.
  double k() const { return V * sigma / (R - sigma); }
  void validate() const;
};

struct State {
  double rho = 0.0;
  double q = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

/// q on the free-phase curve at density rho.
double free_curve_q(double rho, const Params& p);
bool in_free(const State& u, const Params& p);
bool in_congested(const State& u, const Params& p);

/// V on the free phase; v_eq(rho) (1 + q) elsewhere.
double velocity(const State& u, const Params& p);
/// v_eq(rho) (1 + q), regardless of phase.
double congested_velocity(const State& u, const Params& p);
/// Eigenvalue of the congested flux Jacobian with eigenvector (rho, q).
double lambda1(const State& u, const Params& p);

/// Congested state with q/rho = q_l/R and v = v(u_r).
State middle_state(const State& u_l, const State& u_r, const Params& p);

/// Rankine-Hugoniot speed of the density jump from the free state u_l to u_m.
double pt_speed(const State& u_l, const State& u_m, const Params& p);

/// Congested state on q/rho = q_minus/R where the phase transition from u_l is
/// sonic: pt_speed(u_l, u_p) = lambda1(u_p).
State sonic_state(const State& u_l, const Params& p);

struct Wave {
  twophase::WaveKind kind;
  State left;
  State right;
  double speed_lo;
  double speed_hi;
};

struct Solution {
  std::vector<Wave> waves;
  State middle;
  double pt_speed_to_middle = 0.0;
  double lambda1_middle = 0.0;
  bool sonic_case = false;
};

/// Free-left / congested-right Riemann problem: two waves when the phase
/// transition to the middle state is admissible, three otherwise.
Solution solve(const State& u_l, const State& u_r, const Params& p);

enum class Model { Cmr, Bwgpb };

struct PairSpec {
  Model model;
  double rho_l, aux_l, rho_r, aux_r;  // aux is eta (CMR) or q (BWGPB)
};

struct CountRow {
  PairSpec pair;
  int n_waves = -1;   // -1 when the pair could not be solved
  bool ok = false;    // count within the model's bound
  std::string error;
};

/// Solves every pair with its model and reports wave counts.
std::vector<CountRow> compare_wave_counts(const std::vector<PairSpec>& pairs,
                                          const ModelParams& cmr, const Params& bw);

/// Pairs exhibiting the structural difference: CMR F/C, BWGPB 2-wave, BWGPB 3-wave.
std::vector<PairSpec> demo_pairs();

}  // namespace twophase::bwgpb
