#pragma once

#include <vector>

#include "twophase/model.hpp"

namespace twophase {

enum class WaveKind {
  LinearWave,
  PhaseTransition,
  FirstFamilyShock,
  FirstFamilyRarefaction,
  SecondFamilyContact,
};

const char* wave_kind_name(WaveKind kind);

struct Wave {
  WaveKind kind;
  State left;
  State right;
  // Discontinuities have speed_lo == speed_hi. Rarefactions span
  // [lambda1(left), lambda1(right)].
  double speed_lo;
  double speed_hi;

  bool is_discontinuity() const { return kind != WaveKind::FirstFamilyRarefaction; }
};

struct WaveFan {
  State left_state;
  State right_state;
  std::vector<Wave> waves;
  // Carried so that sample() can invert rarefactions without extra arguments.
  ModelParams params;
};

/// State on the 1-Lax curve through u_l with v = v(u_r).
State middle_state_congested(const State& u_l, const State& u_r, const ModelParams& p);

/// Point of the free/congested interface reached from u_l along constant w.
State boundary_state(const State& u_l, const ModelParams& p);

/// Exact self-similar solution of the Riemann problem (u_l | u_r).
WaveFan solve(const State& u_l, const State& u_r, const ModelParams& p);

/// State at x/t = xi. On a discontinuity the right limit is returned.
State sample(const WaveFan& fan, double xi);

struct NumericalFlux {
  double rho;  // F
  double eta;  // G
};

/// Godunov interface flux from the exact Riemann solution.
NumericalFlux godunov_flux(const State& u_l, const State& u_r, const ModelParams& p);

}  // namespace twophase
