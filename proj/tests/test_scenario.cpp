#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "twophase/error.hpp"
#include "twophase/scenario.hpp"

using namespace twophase;
using namespace twophase::scenario;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("twophase_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

TEST_CASE("breakpoint tables") {
  const PiecewiseLinear f{{{0, 1}, {500, 1}, {500, 0}, {3000, 0}}};
  CHECK(f(-5) == 1.0);
  CHECK(f(250) == 1.0);
  CHECK(f(500) == 1.0);
  CHECK(f(500.0001) == 0.0);
  CHECK(f(4000) == 0.0);
  const PiecewiseLinear g{{{0, 120}, {500, 140}}};
  CHECK(g(250) == 130.0);
  CHECK(g(125) == 125.0);
  const PiecewiseLinear tail{{{0, 0}, {10, 1}, {10, 5}}};
  CHECK(tail(10) == 1.0);
  CHECK(tail(11) == 5.0);
}

TEST_CASE("built-in scenarios") {
  const ScenarioConfig es1 = builtin_scenario("es1");
  CHECK(es1.rho0(250) == 1.0);
  CHECK(es1.w0(250) == 130.0);
  CHECK(es1.rho0(600) == 0.0);
  CHECK(es1.t_final == 300.0);
  CHECK(es1.cfl_mode == CflMode::Safe);

  const ScenarioConfig es2 = builtin_scenario("es2");
  CHECK(es2.w0(0) == 140.0);
  CHECK(es2.w0(500) == 120.0);

  const ScenarioConfig es3 = builtin_scenario("es3");
  CHECK(es3.rho0(1500) == Approx(0.2 + 0.5 * 1000 / 2000));
  CHECK(es3.w0(1500) == Approx(140 - 20 * 1000.0 / 2000));
  CHECK(es3.rho0(400) == 0.0);
  CHECK(es3.rho0(2600) == 0.0);
  CHECK(es3.t_final == 200.0);

  CHECK_THROWS_AS(builtin_scenario("es4"), Error);
  for (const char* name : {"es1", "es2", "es3"}) {
    CAPTURE(name);
    CHECK(validate_config(builtin_scenario(name)).empty());
    CHECK(validate_params(model_params(builtin_scenario(name))).empty());
  }
}

TEST_CASE("initial state is converted to SI") {
  const SimState s = initial_state(builtin_scenario("es1"));
  CHECK(s.cells.size() == 3000);
  CHECK(s.params.v_max == Approx(60 / 3.6));
  CHECK(s.cells[250].eta == Approx((120 + 20 * 250.5 / 500) / 3.6));
  CHECK(s.cells[600] == State{0, 0});
}

TEST_CASE("config round trip") {
  for (const char* name : {"es1", "es2", "es3"}) {
    const ScenarioConfig c = builtin_scenario(name);
    CHECK(parse_config(emit_config(c)) == c);
  }
  ScenarioConfig c = builtin_scenario("es3");
  c.name = "custom";
  c.builtin.clear();
  c.psi = "quadratic";
  c.x_min = -0.1;
  c.x_max = 1.0 / 3.0;
  c.n_cells = 77;
  c.bc = BoundaryKind::Dirichlet;
  c.bc_left_rho = 0.3;
  c.bc_left_w = 125.5;
  c.cfl_mode = CflMode::FixedVmax;
  c.courant = 0.7;
  c.snapshot_every = 0.1;
  c.workers = 3;
  c.rho0.points = {{-0.1, 0.1}, {0.2, 0.7}};
  c.w0.points = {{-0.1, 120.1}, {0.2, 139.9}};
  c.out_dir = "/tmp/x y";
  c.plot_script = false;
  CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("config parsing") {
  const char* text = R"(
# comment
[model]
R = 1
v_max = 60
w_min = 120
w_max = 140
psi = linear
[grid]
x_min = 0
x_max = 3000
dx = 2      ; trailing comment
bc = periodic
[numerics]
cfl_mode = paper
courant = 0.7
t_final = 10
[initial]
builtin = es1
[output]
dir = out
)";
  const ScenarioConfig c = parse_config(text);
  CHECK(c.n_cells == 1500);
  CHECK(c.bc == BoundaryKind::Periodic);
  CHECK(c.cfl_mode == CflMode::FixedVmax);
  CHECK(c.courant == 0.7);
  CHECK(c.rho0 == builtin_scenario("es1").rho0);
  CHECK(c.out_dir == "out");

  CHECK_THROWS_AS(parse_config("[model]\nfoo = 1\n[initial]\nbuiltin = es1\n"), Error);
  CHECK_THROWS_AS(parse_config("[nope]\n"), Error);
  CHECK_THROWS_AS(parse_config("[model]\nR = abc\n[initial]\nbuiltin = es1\n"), Error);
  CHECK_THROWS_AS(parse_config("[initial]\nrho_points = 1:0, 0:1\nw_points = 0:120\n"), Error);
  CHECK_THROWS_AS(parse_config("[grid]\ndx = 7\n[initial]\nbuiltin = es1\n"), Error);
  CHECK_THROWS_AS(parse_config("[grid]\ndx = 1\nn_cells = 3000\n[initial]\nbuiltin = es1\n"), Error);
  CHECK_THROWS_AS(parse_config("[model]\nR = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[initial]\nbuiltin = es9\n"), Error);
  try {
    parse_config("[model]\n\nR = x\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("validation reports bad profiles and numerics") {
  ScenarioConfig c = builtin_scenario("es1");
  c.w0.points = {{0, 100}, {3000, 100}};
  CHECK_FALSE(validate_config(c).empty());
  c = builtin_scenario("es1");
  c.courant = 1.5;
  CHECK_FALSE(validate_config(c).empty());
  c = builtin_scenario("es1");
  c.v_max = 130;
  CHECK_FALSE(validate_config(c).empty());
  c = builtin_scenario("es1");
  c.psi = "cubic";
  CHECK_FALSE(validate_config(c).empty());
}

TEST_CASE("run writes fields, summary and plot script") {
  const fs::path dir = fresh_dir("run");
  ScenarioConfig c = builtin_scenario("es1");
  c.n_cells = 300;
  c.t_final = 3.0;
  c.out_dir = dir.string();
  const RunSummary s = run_scenario(c);
  CHECK(s.snapshots == 4);
  CHECK(s.min_rho >= 0.0);
  CHECK(s.max_rho <= 1.0);
  CHECK(s.mass_final == Approx(s.mass_initial).epsilon(1e-12));
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "plot.gp"));
  CHECK_FALSE(fs::exists(dir / "fields.csv.partial"));

  std::ifstream in(dir / "fields.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,rho,eta,w,v");
  // The t = 0 block reproduces the initial profiles.
  for (std::size_t j = 0; j < 300; ++j) {
    REQUIRE(std::getline(in, line));
    const double x = 5.0 + 10.0 * static_cast<double>(j);
    const double rho = x <= 500 ? 1.0 : 0.0;
    const double w = x <= 500 ? 120 + 20 * x / 500 : 0.0;
    const double v = x <= 500 ? std::min(60.0, w * (1 - rho)) : 60.0;
    CHECK(line == "0," + g9(x) + "," + g9(rho) + "," + g9(rho * w) + "," + g9(w) + "," + g9(v));
  }
  std::size_t rows = 301;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1 + 4 * 300);
  fs::remove_all(dir);
}

TEST_CASE("missing output directory: error and no files") {
  const fs::path parent = fresh_dir("missing");
  ScenarioConfig c = builtin_scenario("es1");
  c.n_cells = 100;
  c.t_final = 1.0;
  c.out_dir = (parent / "does_not_exist").string();
  try {
    run_scenario(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  CHECK(fs::is_empty(parent));
  fs::remove_all(parent);
}

TEST_CASE("fields.csv is byte-identical across runs and worker counts") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ScenarioConfig c = builtin_scenario("es3");
  c.n_cells = 500;
  c.t_final = 20.0;
  c.out_dir = a.string();
  run_scenario(c);
  c.out_dir = b.string();
  c.workers = 3;
  run_scenario(c);
  CHECK(slurp(a / "fields.csv") == slurp(b / "fields.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}
