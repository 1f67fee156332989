#include "twophase/bwgpb.hpp"

#include <cmath>
#include <sstream>

#include "twophase/error.hpp"

namespace twophase::bwgpb {

namespace {

constexpr double kMemberTol = 1e-8;
constexpr double kZeroStrength = 1e-12;

std::string show(const State& u) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << u.rho << ", " << u.q << ")";
  return os.str();
}

// lambda1 without the phase check; the middle state of the free/congested
// problem may sit outside the momentum-ratio band.
double lambda1_raw(const State& u, const Params& p) {
  return p.k() * (u.q * p.R / u.rho - 2.0 * u.q - 1.0);
}

double ray_flux(double rho, double ratio, const Params& p) {
  return p.k() * (p.R - rho) * (1.0 + ratio * rho);
}

bool same(const State& a, const State& b) {
  return std::abs(a.rho - b.rho) <= kZeroStrength && std::abs(a.q - b.q) <= kZeroStrength;
}

Wave jump(WaveKind kind, const State& l, const State& r, double s) {
  return Wave{kind, l, r, s, s};
}

}  // namespace

void Params::validate() const {
  std::ostringstream os;
  if (!(R > 0)) os << "R must be positive; ";
  if (!(V > 0)) os << "V must be positive; ";
  if (!(sigma > 0 && sigma <= sigma_plus && sigma_plus < R)) {
    os << "0 < sigma <= sigma_plus < R required; ";
  }
  if (!(q_minus >= 0 && q_minus < q_plus)) os << "0 <= q_minus < q_plus required; ";
  const std::string msg = os.str();
  if (!msg.empty()) fail(ErrorKind::InvalidArgument, "invalid BWGPB parameters: " + msg);
}

double free_curve_q(double rho, const Params& p) {
  return p.R * (rho - p.sigma) / (p.sigma * (p.R - rho));
}

bool in_free(const State& u, const Params& p) {
  if (u.rho < 0.0 || u.rho > p.sigma_plus * (1 + kMemberTol)) return false;
  const double qf = free_curve_q(u.rho, p);
  if (qf < -kMemberTol) return false;
  return std::abs(u.q - qf) <= kMemberTol * std::max(1.0, std::abs(qf));
}

bool in_congested(const State& u, const Params& p) {
  if (!(u.rho > 0.0) || u.rho > p.R * (1 + kMemberTol) || u.q < 0.0) return false;
  if (congested_velocity(u, p) > p.V * (1 + kMemberTol)) return false;
  const double ratio = u.q / u.rho;
  return ratio >= p.q_minus / p.R - kMemberTol && ratio <= p.q_plus / p.R + kMemberTol;
}

double congested_velocity(const State& u, const Params& p) {
  if (!(u.rho > 0.0)) {
    fail(ErrorKind::InvalidArgument, "congested velocity undefined at rho = 0");
  }
  return p.k() * (p.R / u.rho - 1.0) * (1.0 + u.q);
}

double velocity(const State& u, const Params& p) {
  if (in_free(u, p)) return p.V;
  return congested_velocity(u, p);
}

double lambda1(const State& u, const Params& p) {
  if (!in_congested(u, p)) {
    fail(ErrorKind::InvalidArgument, "lambda1 requested outside the congested phase at " + show(u));
  }
  return lambda1_raw(u, p);
}

State middle_state(const State& u_l, const State& u_r, const Params& p) {
  const double ratio = u_l.q / p.R;
  const double v_r = congested_velocity(u_r, p);
  if (std::abs(u_r.q / u_r.rho - ratio) <= kZeroStrength) return u_r;
  if (v_r > p.V * (1 + kMemberTol) || v_r < 0.0) {
    fail(ErrorKind::InvalidArgument, "no congested middle state for right speed " +
                                         std::to_string(v_r));
  }
  if (v_r == 0.0) return {p.R, ratio * p.R};

  // v along the ray q = ratio * rho decreases from +inf at 0 to 0 at R.
  auto v_at = [&](double rho) { return ray_flux(rho, ratio, p) / rho; };
  double lo = 0.5 * p.R;
  while (v_at(lo) <= v_r) {
    lo *= 0.5;
    if (lo < 1e-300) fail(ErrorKind::Numerical, "middle state bracket failed");
  }
  double hi = p.R;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (v_at(mid) > v_r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rho = 0.5 * (lo + hi);
  return {rho, ratio * rho};
}

double pt_speed(const State& u_l, const State& u_m, const Params& p) {
  if (u_m.rho == u_l.rho) {
    fail(ErrorKind::InvalidArgument, "phase transition speed needs distinct densities");
  }
  return (u_m.rho * congested_velocity(u_m, p) - u_l.rho * p.V) / (u_m.rho - u_l.rho);
}

State sonic_state(const State& u_l, const Params& p) {
  const double b = p.q_minus / p.R;
  const double left_flux = u_l.rho * p.V;
  // Tangency defect of the chord from (rho_l, rho_l V) to the ray flux; it is
  // nondecreasing in rho because the ray flux is concave.
  auto defect = [&](double rho) {
    const State u{rho, b * rho};
    return ray_flux(rho, b, p) - lambda1_raw(u, p) * (rho - u_l.rho) - left_flux;
  };
  double lo = u_l.rho;
  double hi = p.R;
  const double d_lo = defect(lo);
  const double d_hi = defect(hi);
  // A root sitting on rho = R shows up as a rounding-level defect of either sign.
  if (!(d_lo < 0.0 && d_hi >= -1e-12 * p.V * p.R)) {
    std::ostringstream os;
    os.precision(12);
    os << "no sonic phase transition from " << show(u_l) << " onto q/rho = q_minus/R"
       << " (tangency defect " << d_lo << " at rho_l, " << d_hi << " at R;"
       << " a root needs q_minus*rho_l/R < q_l <= q_minus)";
    fail(ErrorKind::Numerical, os.str());
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (defect(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rho = hi;
  return {rho, b * rho};
}

Solution solve(const State& u_l, const State& u_r, const Params& p) {
  p.validate();
  Solution sol;
  if (u_l == u_r) {
    sol.middle = u_r;
    return sol;
  }
  if (!in_free(u_l, p)) {
    fail(ErrorKind::InvalidArgument, "left state " + show(u_l) + " is not in the free phase");
  }
  if (!in_congested(u_r, p)) {
    fail(ErrorKind::InvalidArgument,
         "right state " + show(u_r) + " is not in the congested phase");
  }

  const State m = middle_state(u_l, u_r, p);
  const double v_r = congested_velocity(u_r, p);
  sol.middle = m;
  sol.lambda1_middle = lambda1_raw(m, p);

  if (std::abs(m.rho - u_l.rho) < kZeroStrength) {
    if (!same(m, u_r)) sol.waves.push_back(jump(WaveKind::SecondFamilyContact, m, u_r, v_r));
    return sol;
  }

  sol.pt_speed_to_middle = pt_speed(u_l, m, p);
  const double tol = 1e-9 * (p.V + std::abs(sol.lambda1_middle));
  if (sol.pt_speed_to_middle >= sol.lambda1_middle - tol) {
    sol.waves.push_back(jump(WaveKind::PhaseTransition, u_l, m, sol.pt_speed_to_middle));
  } else {
    sol.sonic_case = true;
    const State up = sonic_state(u_l, p);
    const double lam_p = pt_speed(u_l, up, p);
    sol.waves.push_back(jump(WaveKind::PhaseTransition, u_l, up, lam_p));
    if (!same(up, m)) {
      if (lambda1_raw(up, p) > sol.lambda1_middle) {
        fail(ErrorKind::Numerical, "rarefaction from " + show(up) + " to " + show(m) +
                                       " would have decreasing speeds");
      }
      sol.waves.push_back(Wave{WaveKind::FirstFamilyRarefaction, up, m, lambda1_raw(up, p),
                               sol.lambda1_middle});
    }
  }
  if (!same(m, u_r)) {
    sol.waves.push_back(jump(WaveKind::SecondFamilyContact, m, u_r, v_r));
  } else {
    sol.waves.back().right = u_r;
  }
  return sol;
}

std::vector<CountRow> compare_wave_counts(const std::vector<PairSpec>& pairs,
                                          const ModelParams& cmr, const Params& bw) {
  std::vector<CountRow> rows;
  rows.reserve(pairs.size());
  for (const PairSpec& pair : pairs) {
    CountRow row;
    row.pair = pair;
    try {
      if (pair.model == Model::Cmr) {
        const twophase::State l{pair.rho_l, pair.aux_l};
        const twophase::State r{pair.rho_r, pair.aux_r};
        if (!(l == r)) {
          require_admissible(l, cmr, "left");
          require_admissible(r, cmr, "right");
          if (classify(l, cmr) == Phase::Congested || classify(r, cmr) != Phase::Congested) {
            fail(ErrorKind::InvalidArgument, "CMR pair must be free (left) / congested (right)");
          }
        }
        row.n_waves = static_cast<int>(twophase::solve(l, r, cmr).waves.size());
        row.ok = row.n_waves <= 2;
      } else {
        const Solution sol = solve({pair.rho_l, pair.aux_l}, {pair.rho_r, pair.aux_r}, bw);
        row.n_waves = static_cast<int>(sol.waves.size());
        row.ok = row.n_waves <= 3;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PairSpec> demo_pairs() {
  return {
      {Model::Cmr, 0.2, 24.0, 0.95, 114.0},
      // q_l = 0: the phase transition to the middle state is exactly sonic.
      {Model::Bwgpb, 0.5, 0.0, 0.8, 0.2},
      // 0 < q_l < q_minus: the transition lands on q/rho = q_minus/R first.
      {Model::Bwgpb, 0.52, 1.0 / 12.0, 0.8, 0.2},
  };
}

}  // namespace twophase::bwgpb
