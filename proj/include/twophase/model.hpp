#pragma once

#include <functional>
#include <string>
#include <vector>

namespace twophase {

/// Decreasing speed law psi(rho) on [0, R] with psi(0) = 1 and psi(R) = 0.
///
/// The linear profile is evaluated in closed form; every other profile goes
/// through the stored callables, and its inverse falls back to bisection when
/// none is supplied.
class SpeedProfile {
 public:
  using Fn = std::function<double(double)>;

  static SpeedProfile linear(double R);
  /// psi(rho) = 1 - (rho/R)^2.
  static SpeedProfile quadratic(double R);
  static SpeedProfile custom(std::string name, double R, Fn value, Fn derivative,
                             Fn inverse = {});

  double value(double rho) const;
  double derivative(double rho) const;
  /// rho in [0, R] with psi(rho) = y, for y in [0, 1].
  double inverse(double y) const;

  double max_density() const { return R_; }
  const std::string& name() const { return name_; }
  bool is_linear() const { return kind_ == Kind::Linear; }

 private:
  enum class Kind { Linear, Quadratic, Custom };

  SpeedProfile(Kind kind, std::string name, double R)
      : kind_(kind), name_(std::move(name)), R_(R) {}

  double bisect_inverse(double y) const;

  Kind kind_;
  std::string name_;
  double R_;
  Fn value_;
  Fn derivative_;
  Fn inverse_;
};

/// Constants of the 2-phase model. Speeds share one unit system; the solver
/// itself is unit-agnostic (scenarios convert km/h to m/s on ingestion).
struct ModelParams {
  double R = 1.0;
  double v_max = 0.0;
  double w_min = 0.0;  // slowest driver class
  double w_max = 0.0;  // fastest driver class
  SpeedProfile psi = SpeedProfile::linear(1.0);

  double vacuum_density() const { return 1e-10 * R; }
};

/// Conserved pair: density and generalized momentum eta = rho * w.
struct State {
  double rho = 0.0;
  double eta = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

enum class Phase { Free, Congested, FreeCongestedBoundary, Vacuum };

const char* phase_name(Phase phase);

struct ValidationOptions {
  int samples = 1000;
};

/// Hypothesis checks on the model constants and the speed profile.
/// Returns one human-readable line per violation; empty when valid.
std::vector<std::string> validate_params(const ModelParams& p,
                                         ValidationOptions opts = {});

bool is_vacuum(const State& u, const ModelParams& p);
/// rho in [0, R] and, unless vacuum, w in [w_min, w_max] (relative slack 1e-9).
bool is_admissible(const State& u, const ModelParams& p);
/// Throws InvalidArgument when `u` is not admissible.
void require_admissible(const State& u, const ModelParams& p, const char* what);

/// w = eta / rho; 0 for vacuum.
double driver_speed(const State& u, const ModelParams& p);

/// v = min(V_max, w psi(rho)); V_max for vacuum.
double velocity(const State& u, const ModelParams& p);

Phase classify(const State& u, const ModelParams& p);

/// True for Congested and boundary states.
bool in_congested(const State& u, const ModelParams& p);
/// True for Free and boundary states (vacuum counts as free).
bool in_free(const State& u, const ModelParams& p);

/// Physical flux (rho v, eta v).
State flux(const State& u, const ModelParams& p);

/// First characteristic speed eta psi'(rho) + v. Throws at vacuum.
double lambda1(const State& u, const ModelParams& p);
double lambda2(const State& u, const ModelParams& p);

/// 1-Lax curve through u0: constant w.
double lax1(double rho, const State& u0);
/// 2-Lax curve through u0: constant v. Requires psi(rho) > 0 unless v(u0) = 0.
double lax2(double rho, const State& u0, const ModelParams& p);

/// sup over [0, R] of |d(rho psi)/drho|, sampled. Equals 1 for linear psi.
double max_abs_flux_slope(const SpeedProfile& psi, int samples = 2000);

}  // namespace twophase
