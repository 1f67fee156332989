#include "doctest.h"

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "twophase/error.hpp"
#include "twophase/godunov.hpp"

using namespace twophase;
using doctest::Approx;

namespace {

SimState es1_state(std::size_t n, BoundaryCondition bc = {}) {
  const ModelParams p = oracle::es1_si();
  return init_from_profiles(
      Grid{0, 3000, n}, [](double x) { return x <= 500 ? 1.0 : 0.0; },
      [](double x) { return x <= 500 ? (120 + 20 * x / 500) / 3.6 : 0.0; }, p, bc);
}

std::pair<double, double> totals(const SimState& s) {
  double r = 0, e = 0;
  for (const State& u : s.cells) {
    r += u.rho;
    e += u.eta;
  }
  return {r, e};
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g{0, 3000, 3000};
  CHECK(g.dx() == 1.0);
  CHECK(g.center(0) == 0.5);
  CHECK(g.center(2999) == 2999.5);
  CHECK_THROWS_AS(Grid({0, 1, 1}).validate(), Error);
  CHECK_THROWS_AS(Grid({1, 1, 10}).validate(), Error);
}

TEST_CASE("initial data are point samples at the cell centers") {
  const SimState s = init_from_profiles(
      Grid{0, 3000, 12}, [](double x) { return x <= 500 ? 1.0 : 0.0; },
      [](double x) { return x <= 500 ? 120 + 20 * x / 500 : 0.0; }, oracle::es1_kmh());
  // Cell 1 is centred at x = 375; cell 0 at 125. Check x = 250 on a finer grid below.
  CHECK(s.cells[0].rho == 1.0);
  CHECK(s.cells[0].eta == Approx(125.0));
  CHECK(s.cells[2] == State{0.0, 0.0});

  const SimState f = init_from_profiles(
      Grid{0, 1000, 2}, [](double x) { return x <= 500 ? 1.0 : 0.0; },
      [](double x) { return x <= 500 ? 120 + 20 * x / 500 : 0.0; }, oracle::es1_kmh());
  CHECK(f.cells[0].eta == Approx(130.0));  // x = 250
  CHECK(f.cells[1] == State{0.0, 0.0});    // x = 750
}

TEST_CASE("inadmissible initial data are rejected") {
  const ModelParams p = oracle::es1_kmh();
  const Grid g{0, 1, 4};
  CHECK_THROWS_AS(init_from_profiles(g, [](double) { return 0.5; }, [](double) { return 100.0; }, p), Error);
  CHECK_THROWS_AS(init_from_profiles(g, [](double) { return 0.5; }, [](double) { return 0.0; }, p), Error);
  CHECK_THROWS_AS(init_from_profiles(g, [](double) { return 1.5; }, [](double) { return 130.0; }, p), Error);
  const SimState c = init_from_profiles(g, [](double) { return 0.6; }, [](double) { return 125.0; }, p);
  for (const State& u : c.cells) CHECK(u == c.cells[0]);
}

TEST_CASE("time step policies") {
  const SimState s = es1_state(3000);
  CHECK(stable_dt(s, {CflMode::Safe, 0.9}) == Approx(0.9 * 3.6 / 140));
  CHECK(stable_dt(s, {CflMode::Safe, 0.9}) == Approx(0.023142857142857));
  CHECK(stable_dt(s, {CflMode::FixedVmax, 0.7}) == Approx(0.042));
  CHECK_THROWS_AS(stable_dt(s, {CflMode::Safe, 0.0}), Error);
  CHECK_THROWS_AS(stable_dt(s, {CflMode::Safe, 1.5}), Error);

  ModelParams p = oracle::es1_si();
  p.w_max = p.v_max * (1 + 1e-15);
  SimState d = s;
  d.params = p;
  CHECK(stable_dt(d, {CflMode::Safe, 1.0}) == Approx(d.grid.dx() / p.v_max));
}

TEST_CASE("uniform states are steady") {
  const ModelParams p = oracle::es1_si();
  for (const State u : {State{0.8, 0.8 * 125 / 3.6}, State{0.2, 0.2 * 130 / 3.6}}) {
    SimState s = init_from_profiles(
        Grid{0, 100, 50}, [&](double) { return u.rho; }, [&](double) { return u.eta / u.rho; }, p);
    const auto before = s.cells;
    step(s, stable_dt(s, {}));
    for (std::size_t j = 0; j < s.cells.size(); ++j) {
      CHECK(s.cells[j].rho == Approx(before[j].rho).epsilon(1e-15));
      CHECK(s.cells[j].eta == Approx(before[j].eta).epsilon(1e-15));
    }
  }
}

TEST_CASE("one step from Riemann data equals cell averages of the exact solution") {
  const ModelParams p = oracle::es1_si();
  const std::pair<State, State> pairs[] = {
      {oracle::from_w(0.9, 140 / 3.6), oracle::from_w(0.8, 120 / 3.6)},
      {oracle::from_w(0.2, 120 / 3.6), oracle::from_w(0.95, 120 / 3.6)},
      {oracle::from_w(0.3, 130 / 3.6), oracle::from_w(0.8, 125 / 3.6)},
      {oracle::from_w(0.6, 130 / 3.6), oracle::from_w(0.9, 125 / 3.6)},
      {oracle::from_w(0.95, 135 / 3.6), oracle::from_w(0.1, 121 / 3.6)},
      {oracle::from_w(0.7, 128 / 3.6), State{0.0, 0.0}},
  };
  for (const auto& [ul, ur] : pairs) {
    CAPTURE(ul.rho);
    CAPTURE(ur.rho);
    SimState s;
    s.grid = Grid{-10, 10, 20};
    s.params = p;
    s.cells.resize(20);
    for (std::size_t j = 0; j < 20; ++j) s.cells[j] = s.grid.center(j) < 0 ? ul : ur;
    const double dt = stable_dt(s, {CflMode::Safe, 0.9});
    step(s, dt);
    const WaveFan fan = solve(ul, ur, p);
    for (std::size_t j = 0; j < 20; ++j) {
      const double a = -10.0 + static_cast<double>(j);
      const State ex = oracle::exact_cell_average(fan, a, a + 1.0, dt);
      CHECK(s.cells[j].rho == Approx(ex.rho).epsilon(1e-9).scale(1.0));
      CHECK(s.cells[j].eta == Approx(ex.eta).epsilon(1e-9).scale(p.w_max));
    }
  }
}

TEST_CASE("periodic boundaries conserve both quantities") {
  SimState s = es1_state(600, {BoundaryKind::Periodic, {}, {}});
  const auto [r0, e0] = totals(s);
  const double dt = stable_dt(s, {});
  for (int k = 0; k < 200; ++k) {
    step(s, dt);
    const auto [r, e] = totals(s);
    REQUIRE(std::abs(r - r0) <= 1e-12 * r0);
    REQUIRE(std::abs(e - e0) <= 1e-12 * e0);
  }
}

TEST_CASE("Dirichlet boundaries feed the fixed states") {
  const ModelParams p = oracle::es1_si();
  const State in = oracle::from_w(0.3, 130 / 3.6);
  SimState s = init_from_profiles(
      Grid{0, 100, 50}, [](double) { return 0.0; }, [](double) { return 0.0; }, p,
      {BoundaryKind::Dirichlet, in, {0.0, 0.0}});
  const double dt = stable_dt(s, {});
  step(s, dt);
  CHECK(s.cells[0].rho == Approx(dt / s.grid.dx() * in.rho * p.v_max));
  CHECK(s.cells[1].rho == 0.0);
}

TEST_CASE("Safe mode rejects a time step breaking the CFL bound") {
  SimState s = es1_state(300);
  const auto before = s.cells;
  CHECK_THROWS_AS(step(s, 2.0 * stable_dt(s, {CflMode::Safe, 1.0})), Error);
  CHECK(s.cells == before);
  CHECK(s.t == 0.0);
}

TEST_CASE("instability is detected and leaves the state untouched") {
  SimState s = es1_state(300);
  const auto before = s.cells;
  StepOptions opts;
  opts.check_cfl = false;
  CHECK_THROWS_AS(step(s, 40.0 * stable_dt(s, {}), opts), Error);
  CHECK(s.cells == before);
}

TEST_CASE("run: snapshots and exact landing on T") {
  SimState s = es1_state(300);
  RunOptions opts;
  SUBCASE("T = 0 yields only the initial data") {
    const auto snaps = run(s, 0.0, opts);
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].t == 0.0);
  }
  SUBCASE("300 s at 1 s intervals") {
    const auto snaps = run(s, 300.0, opts);
    CHECK(snaps.size() == 301);
    CHECK(snaps.front().t == 0.0);
    CHECK(snaps.back().t == 300.0);
    CHECK(s.t == 300.0);
    for (std::size_t k = 1; k + 1 < snaps.size(); ++k) {
      CHECK(snaps[k].t >= static_cast<double>(k) - 1e-9);
      CHECK(snaps[k].t < static_cast<double>(k) + stable_dt(s, opts.cfl));
    }
  }
  SUBCASE("final time before the start is rejected") {
    s.t = 5.0;
    CHECK_THROWS_AS(run(s, 1.0, opts), Error);
  }
}

TEST_CASE("results do not depend on the number of flux workers") {
  SimState a = es1_state(700), b = es1_state(700);
  RunOptions o1, o4;
  o4.workers = 4;
  const auto s1 = run(a, 20.0, o1);
  const auto s4 = run(b, 20.0, o4);
  REQUIRE(s1.size() == s4.size());
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK(s1[k].t == s4[k].t);
    CHECK(s1[k].cells == s4[k].cells);
  }
}

TEST_CASE("w stays within its bounds on random congested data") {
  const ModelParams p = oracle::es1_si();
  std::mt19937_64 rng(5);
  SimState s;
  s.grid = Grid{0, 400, 400};
  s.params = p;
  s.bc = {BoundaryKind::Periodic, {}, {}};
  for (int j = 0; j < 400; ++j) s.cells.push_back(oracle::random_state(rng, p));
  RunOptions opts;
  opts.snapshot_every = 0;
  const RunStats st = run(s, 30.0, opts, nullptr);
  CHECK(st.w_violation <= 1e-9);
  CHECK(st.rho_violation <= 1e-9);
  for (const State& u : s.cells) {
    REQUIRE(is_admissible(u, p));
  }
}
