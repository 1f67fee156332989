#include "twophase/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twophase/error.hpp"

namespace twophase {

namespace {

constexpr double kPhaseTol = 1e-9;
constexpr double kAdmissibleTol = 1e-9;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

SpeedProfile SpeedProfile::linear(double R) {
  return SpeedProfile(Kind::Linear, "linear", R);
}

SpeedProfile SpeedProfile::quadratic(double R) {
  return SpeedProfile(Kind::Quadratic, "quadratic", R);
}

SpeedProfile SpeedProfile::custom(std::string name, double R, Fn value,
                                  Fn derivative, Fn inverse) {
  SpeedProfile s(Kind::Custom, std::move(name), R);
  s.value_ = std::move(value);
  s.derivative_ = std::move(derivative);
  s.inverse_ = std::move(inverse);
  return s;
}

double SpeedProfile::value(double rho) const {
  switch (kind_) {
    case Kind::Linear:
      return 1.0 - rho / R_;
    case Kind::Quadratic: {
      const double s = rho / R_;
      return 1.0 - s * s;
    }
    case Kind::Custom:
      return value_(rho);
  }
  return 0.0;
}

double SpeedProfile::derivative(double rho) const {
  switch (kind_) {
    case Kind::Linear:
      return -1.0 / R_;
    case Kind::Quadratic:
      return -2.0 * rho / (R_ * R_);
    case Kind::Custom:
      return derivative_(rho);
  }
  return 0.0;
}

double SpeedProfile::inverse(double y) const {
  y = std::clamp(y, 0.0, 1.0);
  if (kind_ == Kind::Linear) return R_ * (1.0 - y);
  if (kind_ == Kind::Custom && inverse_) return inverse_(y);
  return bisect_inverse(y);
}

double SpeedProfile::bisect_inverse(double y) const {
  // psi is nonincreasing: psi(lo) >= y >= psi(hi).
  double lo = 0.0;
  double hi = R_;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * R_; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (value(mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Free:
      return "free";
    case Phase::Congested:
      return "congested";
    case Phase::FreeCongestedBoundary:
      return "boundary";
    case Phase::Vacuum:
      return "vacuum";
  }
  return "?";
}

double max_abs_flux_slope(const SpeedProfile& psi, int samples) {
  const double R = psi.max_density();
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double rho = R * i / samples;
    best = std::max(best, std::abs(psi.value(rho) + rho * psi.derivative(rho)));
  }
  return best;
}

std::vector<std::string> validate_params(const ModelParams& p,
                                         ValidationOptions opts) {
  std::vector<std::string> out;
  const int n = std::max(opts.samples, 1000);

  if (!(p.R > 0)) out.push_back("speed bounds: R must be positive (R=" + fmt(p.R) + ")");
  if (!(p.v_max > 0)) out.push_back("speed bounds: V_max must be positive");
  if (!(p.v_max < p.w_min)) {
    out.push_back("speed bounds: V_max < w_min required (V_max=" + fmt(p.v_max) +
                  ", w_min=" + fmt(p.w_min) + ")");
  }
  if (!(p.w_min < p.w_max)) {
    out.push_back("speed bounds: w_min < w_max required (w_min=" + fmt(p.w_min) +
                  ", w_max=" + fmt(p.w_max) + ")");
  }
  if (!out.empty() && !(p.R > 0)) return out;

  const SpeedProfile& psi = p.psi;
  if (std::abs(psi.max_density() - p.R) > 1e-12 * p.R) {
    out.push_back("speed profile: speed profile is defined on [0," +
                  fmt(psi.max_density()) + "], model uses R=" + fmt(p.R));
  }
  if (std::abs(psi.value(0.0) - 1.0) > 1e-12) {
    out.push_back("speed profile: psi(0) = " + fmt(psi.value(0.0)) + ", expected 1");
  }
  if (std::abs(psi.value(p.R)) > 1e-12) {
    out.push_back("speed profile: psi(R) = " + fmt(psi.value(p.R)) + ", expected 0");
  }

  const double h = p.R / n;
  double worst_slope = -INFINITY;
  double worst_curv = -INFINITY;
  double worst_range = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double rho = i * h;
    const double val = psi.value(rho);
    worst_range = std::max({worst_range, val - 1.0, -val});
    worst_slope = std::max(worst_slope, psi.derivative(rho));
    if (i > 0 && i < n) {
      // (rho psi)'' by central differences of rho psi' + psi.
      const double gp = psi.value(rho + h) + (rho + h) * psi.derivative(rho + h);
      const double gm = psi.value(rho - h) + (rho - h) * psi.derivative(rho - h);
      worst_curv = std::max(worst_curv, (gp - gm) / (2 * h));
    }
  }
  if (worst_range > 1e-12) out.push_back("speed profile: psi leaves [0,1]");
  if (worst_slope > 1e-12) {
    out.push_back("speed profile: psi' > 0 somewhere (max psi' = " + fmt(worst_slope) + ")");
  }
  if (worst_curv > 1e-8) {
    out.push_back("speed profile: rho psi is not concave (max (rho psi)'' = " +
                  fmt(worst_curv) + ")");
  }

  if (p.v_max > 0 && p.w_min > 0 && p.w_max > p.w_min) {
    // Sample the congested set C = {w psi(rho) <= V_max} on a (rho, w) grid.
    const int nw = 50;
    double worst_l1 = -INFINITY;
    double at_rho = 0.0;
    double at_w = 0.0;
    for (int k = 0; k <= nw; ++k) {
      const double w = p.w_min + (p.w_max - p.w_min) * k / nw;
      for (int i = 0; i <= n; ++i) {
        const double rho = i * h;
        const double ps = psi.value(rho);
        if (w * ps > p.v_max) continue;
        const double l1 = w * (ps + rho * psi.derivative(rho));
        if (l1 > worst_l1) {
          worst_l1 = l1;
          at_rho = rho;
          at_w = w;
        }
      }
    }
    if (worst_l1 > 1e-12 * p.w_max) {
      out.push_back("congested phase: first-family speed " + fmt(worst_l1) +
                    " > 0 in the congested phase at rho=" + fmt(at_rho) +
                    ", w=" + fmt(at_w));
    }
  }
  return out;
}

bool is_vacuum(const State& u, const ModelParams& p) {
  return u.rho <= p.vacuum_density();
}

bool is_admissible(const State& u, const ModelParams& p) {
  if (!std::isfinite(u.rho) || !std::isfinite(u.eta)) return false;
  if (u.rho < 0.0 || u.rho > p.R * (1 + kAdmissibleTol)) return false;
  if (is_vacuum(u, p)) return true;
  const double w = u.eta / u.rho;
  return w >= p.w_min * (1 - kAdmissibleTol) && w <= p.w_max * (1 + kAdmissibleTol);
}

void require_admissible(const State& u, const ModelParams& p, const char* what) {
  if (!is_admissible(u, p)) {
    fail(ErrorKind::InvalidArgument,
         std::string(what) + " state (" + fmt(u.rho) + ", " + fmt(u.eta) +
             ") is outside the admissible set");
  }
}

double driver_speed(const State& u, const ModelParams& p) {
  return is_vacuum(u, p) ? 0.0 : u.eta / u.rho;
}

double velocity(const State& u, const ModelParams& p) {
  if (is_vacuum(u, p)) return p.v_max;
  return std::min(p.v_max, u.eta / u.rho * p.psi.value(u.rho));
}

Phase classify(const State& u, const ModelParams& p) {
  if (is_vacuum(u, p)) return Phase::Vacuum;
  const double s = u.eta / u.rho * p.psi.value(u.rho);
  const double tol = kPhaseTol * p.v_max;
  if (s > p.v_max + tol) return Phase::Free;
  if (s < p.v_max - tol) return Phase::Congested;
  return Phase::FreeCongestedBoundary;
}

bool in_congested(const State& u, const ModelParams& p) {
  const Phase ph = classify(u, p);
  return ph == Phase::Congested || ph == Phase::FreeCongestedBoundary;
}

bool in_free(const State& u, const ModelParams& p) {
  return classify(u, p) != Phase::Congested;
}

State flux(const State& u, const ModelParams& p) {
  if (is_vacuum(u, p)) return {0.0, 0.0};
  const double v = velocity(u, p);
  return {u.rho * v, u.eta * v};
}

double lambda1(const State& u, const ModelParams& p) {
  if (is_vacuum(u, p)) {
    fail(ErrorKind::InvalidArgument, "lambda1 is undefined at vacuum");
  }
  return u.eta * p.psi.derivative(u.rho) + velocity(u, p);
}

double lambda2(const State& u, const ModelParams& p) { return velocity(u, p); }

double lax1(double rho, const State& u0) { return u0.eta * rho / u0.rho; }

double lax2(double rho, const State& u0, const ModelParams& p) {
  const double v0 = velocity(u0, p);
  const double ps = p.psi.value(rho);
  if (ps <= 0.0) {
    if (v0 == 0.0) return u0.eta;
    fail(ErrorKind::InvalidArgument,
         "2-Lax curve with v > 0 does not reach psi(rho) = 0");
  }
  return rho * v0 / ps;
}

}  // namespace twophase
