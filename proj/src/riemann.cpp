#include "twophase/riemann.hpp"

#include <cmath>

#include "twophase/error.hpp"

namespace twophase {

namespace {

// First-family waves whose density jump is below this are dropped.
constexpr double kZeroStrength = 1e-12;

Wave discontinuity(WaveKind kind, const State& l, const State& r, double s) {
  return Wave{kind, l, r, s, s};
}

double rh_speed(const State& l, const State& r, const ModelParams& p) {
  const State fl = flux(l, p);
  const State fr = flux(r, p);
  return (fr.rho - fl.rho) / (r.rho - l.rho);
}

// First-family wave along constant w from a to b. Returns false when the
// wave has zero strength.
bool first_family(const State& a, const State& b, const ModelParams& p, Wave& out) {
  if (std::abs(a.rho - b.rho) < kZeroStrength) return false;
  if (b.rho > a.rho) {
    out = discontinuity(WaveKind::FirstFamilyShock, a, b, rh_speed(a, b, p));
  } else {
    out = Wave{WaveKind::FirstFamilyRarefaction, a, b, lambda1(a, p), lambda1(b, p)};
  }
  return true;
}

// The closing wave is kept even at zero strength so that every fan carries
// the full wave structure of its case.
void close_fan(WaveFan& fan, const State& from, WaveKind kind, double speed) {
  fan.waves.push_back(discontinuity(kind, from, fan.right_state, speed));
}

}  // namespace

const char* wave_kind_name(WaveKind kind) {
  switch (kind) {
    case WaveKind::LinearWave:
      return "linear";
    case WaveKind::PhaseTransition:
      return "phase_transition";
    case WaveKind::FirstFamilyShock:
      return "shock1";
    case WaveKind::FirstFamilyRarefaction:
      return "rarefaction1";
    case WaveKind::SecondFamilyContact:
      return "contact2";
  }
  return "?";
}

State middle_state_congested(const State& u_l, const State& u_r, const ModelParams& p) {
  if (is_vacuum(u_l, p)) {
    fail(ErrorKind::InvalidArgument, "middle state requires a non-vacuum left state");
  }
  const double v_r = velocity(u_r, p);
  if (in_congested(u_l, p) && velocity(u_l, p) == v_r) return u_l;
  const double w_l = u_l.eta / u_l.rho;
  if (v_r <= 0.0) return {p.R, w_l * p.R};
  const double rho_m = p.psi.inverse(v_r / w_l);
  return {rho_m, w_l * rho_m};
}

State boundary_state(const State& u_l, const ModelParams& p) {
  if (is_vacuum(u_l, p)) {
    fail(ErrorKind::InvalidArgument, "boundary state requires a non-vacuum state");
  }
  const double w_l = u_l.eta / u_l.rho;
  if (classify(u_l, p) == Phase::FreeCongestedBoundary) return u_l;
  const double rho_b = p.psi.inverse(p.v_max / w_l);
  return {rho_b, w_l * rho_b};
}

WaveFan solve(const State& u_l, const State& u_r, const ModelParams& p) {
  require_admissible(u_l, p, "left");
  require_admissible(u_r, p, "right");

  WaveFan fan{u_l, u_r, {}, p};
  if (u_l == u_r) return fan;

  const bool left_vac = is_vacuum(u_l, p);
  const bool right_vac = is_vacuum(u_r, p);
  if (left_vac && right_vac) return fan;

  if (left_vac) {
    // The tail of the right platoon moves away at its own speed.
    const WaveKind kind = classify(u_r, p) == Phase::Congested
                              ? WaveKind::SecondFamilyContact
                              : WaveKind::LinearWave;
    fan.waves.push_back(discontinuity(kind, u_l, u_r, velocity(u_r, p)));
    return fan;
  }

  const bool left_c = in_congested(u_l, p);
  const bool right_c = !right_vac && in_congested(u_r, p);
  const bool right_strict_c = !right_vac && classify(u_r, p) == Phase::Congested;

  Wave w{};
  if (left_c && right_c) {
    // (2) first family to the middle state, then a contact at v_r.
    const State m = middle_state_congested(u_l, u_r, p);
    State from = u_l;
    if (first_family(u_l, m, p, w)) {
      fan.waves.push_back(w);
      from = m;
    }
    close_fan(fan, from, WaveKind::SecondFamilyContact, velocity(u_r, p));
  } else if (left_c) {
    // (3) first family down to the phase boundary, then a linear wave.
    const State b = boundary_state(u_l, p);
    State from = u_l;
    if (first_family(u_l, b, p, w)) {
      fan.waves.push_back(w);
      from = b;
    }
    close_fan(fan, from, WaveKind::LinearWave, p.v_max);
  } else if (right_strict_c) {
    // (4) phase transition into the congested phase, then a contact.
    const State m = middle_state_congested(u_l, u_r, p);
    State from = u_l;
    if (std::abs(m.rho - u_l.rho) >= kZeroStrength) {
      fan.waves.push_back(
          discontinuity(WaveKind::PhaseTransition, u_l, m, rh_speed(u_l, m, p)));
      from = m;
    }
    close_fan(fan, from, WaveKind::SecondFamilyContact, velocity(u_r, p));
  } else {
    // (1) free to free (or to vacuum).
    fan.waves.push_back(discontinuity(WaveKind::LinearWave, u_l, u_r, p.v_max));
  }
  return fan;
}

State sample(const WaveFan& fan, double xi) {
  if (fan.waves.empty()) return xi < 0.0 ? fan.left_state : fan.right_state;
  const ModelParams& p = fan.params;
  State current = fan.left_state;
  for (const Wave& wave : fan.waves) {
    if (xi < wave.speed_lo) return current;
    if (!wave.is_discontinuity() && xi < wave.speed_hi) {
      // lambda1 decreases with rho along the constant-w curve.
      const double w = wave.left.eta / wave.left.rho;
      double lo = wave.right.rho;  // largest speed
      double hi = wave.left.rho;   // smallest speed
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (lambda1(State{mid, w * mid}, p) > xi) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double rho = 0.5 * (lo + hi);
      return {rho, w * rho};
    }
    current = wave.right;
  }
  return current;
}

NumericalFlux godunov_flux(const State& u_l, const State& u_r, const ModelParams& p) {
  if (is_vacuum(u_l, p)) return {0.0, 0.0};
  const double V = p.v_max;
  const NumericalFlux left_flux{u_l.rho * V, u_l.eta * V};
  const bool left_c = in_congested(u_l, p);

  if (is_vacuum(u_r, p)) {
    if (!left_c) return left_flux;
    const State b = boundary_state(u_l, p);
    return {b.rho * V, b.eta * V};
  }

  if (left_c) {
    if (in_congested(u_r, p)) {
      const State m = middle_state_congested(u_l, u_r, p);
      const double v_m = velocity(m, p);
      return {m.rho * v_m, m.eta * v_m};
    }
    const State b = boundary_state(u_l, p);
    return {b.rho * V, b.eta * V};
  }

  if (classify(u_r, p) != Phase::Congested) return left_flux;

  const State m = middle_state_congested(u_l, u_r, p);
  const double v_m = velocity(m, p);
  const double middle_rho_flux = m.rho * v_m;
  // Phase transition with nonpositive speed: the middle state sits on x = 0.
  if (left_flux.rho >= middle_rho_flux) return {middle_rho_flux, m.eta * v_m};
  return left_flux;
}

}  // namespace twophase
