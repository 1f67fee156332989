#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "twophase/error.hpp"
#include "twophase/riemann.hpp"

using namespace twophase;
using doctest::Approx;

namespace {

void check_state(const State& got, double rho, double eta, double eps = 1e-12) {
  if (eps == 0.0) {
    CHECK(got == State{rho, eta});
    return;
  }
  CHECK(got.rho == Approx(rho).epsilon(eps));
  CHECK(got.eta == Approx(eta).epsilon(eps));
}

}  // namespace

TEST_CASE("middle state from the closed-form inverse") {
  const ModelParams p = oracle::es1_kmh();
  // psi(rho_m) = 24 / 140.
  check_state(middle_state_congested({0.9, 126}, {0.8, 96}, p), 1 - 24.0 / 140, 140 * (1 - 24.0 / 140));
  check_state(middle_state_congested({0.9, 126}, {0.8, 96}, p), 0.8285714285714286, 116.0);
  check_state(middle_state_congested({0.2, 24}, {0.95, 114}, p), 0.95, 114.0);
  check_state(middle_state_congested({0.2, 24}, {1.0, 130}, p), 1.0, 120.0);
}

TEST_CASE("boundary state lies on w psi = V") {
  const ModelParams p = oracle::es1_kmh();
  const State b = boundary_state({0.9, 126}, p);
  check_state(b, 1 - 60.0 / 140, 140 * (1 - 60.0 / 140));
  CHECK(classify(b, p) == Phase::FreeCongestedBoundary);
}

TEST_CASE("congested pair: rarefaction then contact") {
  const ModelParams p = oracle::es1_kmh();
  const WaveFan fan = solve({0.9, 126}, {0.8, 96}, p);
  REQUIRE(fan.waves.size() == 2);
  CHECK(fan.waves[0].kind == WaveKind::FirstFamilyRarefaction);
  CHECK(fan.waves[0].speed_lo == Approx(140 * (1 - 1.8)));
  CHECK(fan.waves[0].speed_hi == Approx(140 * (1 - 2 * 0.8285714285714286)));
  CHECK(fan.waves[0].speed_lo == Approx(-112.0));
  CHECK(fan.waves[0].speed_hi == Approx(-92.0));
  CHECK(fan.waves[1].kind == WaveKind::SecondFamilyContact);
  CHECK(fan.waves[1].speed_lo == Approx(24.0));
  check_state(fan.waves[0].right, 0.8285714285714286, 116.0);
}

TEST_CASE("free left, congested right: phase transition then contact") {
  const ModelParams p = oracle::es1_kmh();
  const WaveFan fan = solve({0.2, 24}, {0.95, 114}, p);
  REQUIRE(fan.waves.size() == 2);
  CHECK(fan.waves[0].kind == WaveKind::PhaseTransition);
  CHECK(fan.waves[0].speed_lo == Approx((5.7 - 12.0) / 0.75));
  CHECK(fan.waves[0].speed_lo == Approx(-8.4));
  CHECK(fan.waves[1].kind == WaveKind::SecondFamilyContact);
  CHECK(fan.waves[1].speed_lo == Approx(6.0));
}

TEST_CASE("identical states give an empty fan") {
  const ModelParams p = oracle::es1_kmh();
  CHECK(solve({0.8, 96}, {0.8, 96}, p).waves.empty());
  CHECK(solve({0.0, 0.0}, {0.0, 0.0}, p).waves.empty());
}

TEST_CASE("free pair: one linear wave at V") {
  const ModelParams p = oracle::es1_kmh();
  const WaveFan fan = solve({0.2, 24}, {0.3, 42}, p);
  REQUIRE(fan.waves.size() == 1);
  CHECK(fan.waves[0].kind == WaveKind::LinearWave);
  CHECK(fan.waves[0].speed_lo == 60.0);
}

TEST_CASE("congested left, free right: rarefaction to the boundary then linear wave") {
  const ModelParams p = oracle::es1_kmh();
  const WaveFan fan = solve({0.9, 126}, {0.2, 24}, p);
  REQUIRE(fan.waves.size() == 2);
  CHECK(fan.waves[0].kind == WaveKind::FirstFamilyRarefaction);
  check_state(fan.waves[0].right, 1 - 60.0 / 140, 140 - 60.0);
  CHECK(fan.waves[1].kind == WaveKind::LinearWave);
  CHECK(fan.waves[1].speed_lo == 60.0);
}

TEST_CASE("sampling") {
  const ModelParams p = oracle::es1_kmh();
  const WaveFan fan = solve({0.9, 126}, {0.8, 96}, p);
  check_state(sample(fan, -200.0), 0.9, 126.0, 0.0);
  // 140 (1 - 2 rho) = -102.
  check_state(sample(fan, -102.0), (1 + 102.0 / 140) / 2, 140 * (1 + 102.0 / 140) / 2, 1e-10);
  check_state(sample(fan, -102.0), 0.8642857142857143, 121.0, 1e-10);
  check_state(sample(fan, 0.0), 0.8285714285714286, 116.0);
  check_state(sample(fan, 100.0), 0.8, 96.0, 0.0);
  // Right limit on a discontinuity.
  check_state(sample(fan, 24.0), 0.8, 96.0, 0.0);
}

TEST_CASE("Godunov flux examples") {
  const ModelParams p = oracle::es1_kmh();
  NumericalFlux f = godunov_flux({0.8, 96}, {0.8, 96}, p);
  CHECK(f.rho == Approx(19.2));
  CHECK(f.eta == Approx(2304.0));
  f = godunov_flux({0.2, 24}, {0.8, 96}, p);
  CHECK(f.rho == Approx(12.0));
  CHECK(f.eta == Approx(1440.0));
  f = godunov_flux({0.45, 54}, {0.95, 114}, p);
  CHECK(f.rho == Approx(5.7));
  CHECK(f.eta == Approx(684.0));
}

TEST_CASE("vacuum Riemann problems") {
  const ModelParams p = oracle::es1_kmh();
  const State vac{0.0, 0.0};
  SUBCASE("vacuum on the left") {
    const NumericalFlux f = godunov_flux(vac, {0.8, 96}, p);
    CHECK(f.rho == 0.0);
    CHECK(f.eta == 0.0);
    const WaveFan fan = solve(vac, {0.8, 96}, p);
    REQUIRE(fan.waves.size() == 1);
    CHECK(fan.waves[0].kind == WaveKind::SecondFamilyContact);
    CHECK(fan.waves[0].speed_lo == Approx(24.0));
    CHECK(solve(vac, {0.2, 24}, p).waves[0].kind == WaveKind::LinearWave);
  }
  SUBCASE("vacuum on the right, free left") {
    const NumericalFlux f = godunov_flux({0.2, 24}, vac, p);
    CHECK(f.rho == Approx(12.0));
    CHECK(f.eta == Approx(1440.0));
  }
  SUBCASE("vacuum on the right, congested left: sonic flux at the phase boundary") {
    // Maximum of rho min(V, w psi) along w = 130 is at rho = 1 - 60/130.
    const double rb = 1 - 60.0 / 130;
    const NumericalFlux f = godunov_flux({1.0, 130}, vac, p);
    CHECK(f.rho == Approx(rb * 60.0));
    CHECK(f.eta == Approx(rb * 130 * 60.0));
    const WaveFan fan = solve({1.0, 130}, vac, p);
    REQUIRE(fan.waves.size() == 2);
    CHECK(fan.waves[0].kind == WaveKind::FirstFamilyRarefaction);
    CHECK(fan.waves[1].kind == WaveKind::LinearWave);
  }
}

TEST_CASE("inadmissible input is rejected") {
  const ModelParams p = oracle::es1_kmh();
  CHECK_THROWS_AS(solve({0.5, 10}, {0.8, 96}, p), Error);
  CHECK_THROWS_AS(solve({0.5, 65}, {1.5, 96}, p), Error);
}

TEST_CASE("random pairs: structure, Rankine-Hugoniot, entropy, flux agreement") {
  std::mt19937_64 rng(11);
  const ModelParams p = oracle::es1_kmh();
  int agreement_checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const State ul = oracle::random_state(rng, p);
    const State ur = oracle::random_state(rng, p);
    const WaveFan fan = solve(ul, ur, p);
    REQUIRE(fan.waves.size() <= 2);
    REQUIRE_FALSE(fan.waves.empty());
    CHECK(fan.waves.front().left == ul);
    CHECK(fan.waves.back().right == ur);
    double prev = -1e300;
    const double wl = ul.eta / ul.rho, wr = ur.eta / ur.rho;
    for (std::size_t k = 0; k < fan.waves.size(); ++k) {
      const Wave& w = fan.waves[k];
      if (k) CHECK(w.left == fan.waves[k - 1].right);
      CHECK(w.speed_lo <= w.speed_hi);
      CHECK(w.speed_lo >= prev - 1e-12);
      prev = w.speed_hi;
      const double wm = w.right.eta / w.right.rho;
      CHECK(wm >= std::min(wl, wr) * (1 - 1e-14));
      CHECK(wm <= std::max(wl, wr) * (1 + 1e-14));
      if (w.is_discontinuity()) CHECK(oracle::rh_residual(w.left, w.right, w.speed_lo, p) <= 1e-10);
      if (w.kind == WaveKind::FirstFamilyShock) {
        CHECK(lambda1(w.left, p) >= w.speed_lo - 1e-10);
        CHECK(w.speed_lo >= lambda1(w.right, p) - 1e-10);
      }
      if (w.kind == WaveKind::FirstFamilyRarefaction) {
        CHECK(lambda1(w.left, p) <= lambda1(w.right, p));
      }
    }
    // Flux equals the physical flux of the state at x/t = 0+.
    bool near_zero = false;
    for (const Wave& w : fan.waves) near_zero |= std::abs(w.speed_lo) < 1e-8 || std::abs(w.speed_hi) < 1e-8;
    if (!near_zero) {
      const NumericalFlux g = godunov_flux(ul, ur, p);
      const State f = flux(sample(fan, 1e-12), p);
      CHECK(g.rho == Approx(f.rho).epsilon(1e-10));
      CHECK(g.eta == Approx(f.eta).epsilon(1e-10));
      ++agreement_checked;
    }
  }
  CHECK(agreement_checked > 2500);
}

TEST_CASE("stationary phase transition: both flux branches coincide") {
  const ModelParams p = oracle::es1_kmh();
  // rho_l V = rho_m v_m with w = 120 everywhere: 60 rho_l = 120 rho_m (1 - rho_m).
  const double rho_m = 0.8;
  const double rho_l = 120 * rho_m * (1 - rho_m) / 60;
  const State ul{rho_l, 120 * rho_l}, ur{rho_m, 120 * rho_m};
  const NumericalFlux f = godunov_flux(ul, ur, p);
  CHECK(f.rho == Approx(rho_l * 60));
  CHECK(f.eta == Approx(120 * rho_l * 60));
  CHECK(solve(ul, ur, p).waves[0].speed_lo == Approx(0.0).epsilon(1e-12));
}
