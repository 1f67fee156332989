#include "twophase/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "twophase/error.hpp"

namespace twophase::scenario {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
  fail(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

double parse_double(std::string_view text, int line) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    parse_error(line, "expected a number, got '" + t + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, int line) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  parse_error(line, "expected true/false, got '" + t + "'");
}

PiecewiseLinear parse_points(std::string_view text, int line) {
  PiecewiseLinear out;
  std::string rest(text);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) parse_error(line, "breakpoint '" + trim(item) + "' lacks ':'");
    out.points.emplace_back(parse_double(std::string_view(item).substr(0, colon), line),
                            parse_double(std::string_view(item).substr(colon + 1), line));
  }
  if (out.points.empty()) parse_error(line, "empty breakpoint table");
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (out.points[i].first < out.points[i - 1].first) {
      parse_error(line, "breakpoints must be sorted in x");
    }
  }
  return out;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string emit_points(const PiecewiseLinear& f) {
  std::string out;
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    if (i) out += ", ";
    out += num(f.points[i].first) + ":" + num(f.points[i].second);
  }
  return out;
}

const char* bc_name(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Outflow:
      return "outflow";
    case BoundaryKind::Periodic:
      return "periodic";
    case BoundaryKind::Dirichlet:
      return "dirichlet";
  }
  return "?";
}

SpeedProfile make_psi(const std::string& name, double R) {
  if (name == "linear") return SpeedProfile::linear(R);
  if (name == "quadratic") return SpeedProfile::quadratic(R);
  fail(ErrorKind::InvalidArgument, "unknown speed profile '" + name + "'");
}

State user_state(double rho, double w_kmh, const ModelParams& p) {
  if (rho <= p.vacuum_density()) return {0.0, 0.0};
  return {rho, rho * w_kmh * kKmhToMs};
}

}  // namespace

double PiecewiseLinear::operator()(double x) const {
  if (points.empty()) return 0.0;
  if (x <= points.front().first) return points.front().second;
  if (x >= points.back().first) {
    // First entry of a trailing jump, for left continuity.
    auto it = std::lower_bound(points.begin(), points.end(), x,
                               [](const auto& pt, double v) { return pt.first < v; });
    return it == points.end() ? points.back().second : it->second;
  }
  auto it = std::lower_bound(points.begin(), points.end(), x,
                             [](const auto& pt, double v) { return pt.first < v; });
  if (it->first == x) return it->second;
  const auto& [x1, v1] = *it;
  const auto& [x0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
}

ScenarioConfig builtin_scenario(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  cfg.builtin = std::string(name);
  if (name == "es1") {
    // Jam behind a light at x = 500, w rising from w_min to w_max.
    cfg.rho0.points = {{0, 1}, {500, 1}, {500, 0}, {3000, 0}};
    cfg.w0.points = {{0, 120}, {500, 140}, {500, 0}, {3000, 0}};
    cfg.t_final = 300;
  } else if (name == "es2") {
    cfg.rho0.points = {{0, 1}, {500, 1}, {500, 0}, {3000, 0}};
    cfg.w0.points = {{0, 140}, {500, 120}, {500, 0}, {3000, 0}};
    cfg.t_final = 300;
  } else if (name == "es3") {
    // Increasing density, decreasing w on (500, 2500).
    cfg.rho0.points = {{0, 0}, {500, 0}, {500, 0.2}, {2500, 0.7}, {2500, 0}, {3000, 0}};
    cfg.w0.points = {{0, 0}, {500, 0}, {500, 140}, {2500, 120}, {2500, 0}, {3000, 0}};
    cfg.t_final = 200;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown built-in scenario '" + std::string(name) + "'");
  }
  return cfg;
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  cfg.rho0.points.clear();
  cfg.w0.points.clear();
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool have_dx = false;
  double dx = 0.0;
  bool have_cells = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(line_no, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const char* known[] = {"scenario", "model", "grid", "numerics", "initial", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        parse_error(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(line_no, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string val = trim(std::string_view(line).substr(eq + 1));
    auto unknown = [&] { parse_error(line_no, "unknown key '" + key + "' in [" + section + "]"); };

    if (section == "scenario") {
      if (key == "name") cfg.name = val;
      else unknown();
    } else if (section == "model") {
      if (key == "R") cfg.R = parse_double(val, line_no);
      else if (key == "v_max") cfg.v_max = parse_double(val, line_no);
      else if (key == "w_min") cfg.w_min = parse_double(val, line_no);
      else if (key == "w_max") cfg.w_max = parse_double(val, line_no);
      else if (key == "psi") cfg.psi = val;
      else unknown();
    } else if (section == "grid") {
      if (key == "x_min") cfg.x_min = parse_double(val, line_no);
      else if (key == "x_max") cfg.x_max = parse_double(val, line_no);
      else if (key == "n_cells") {
        const double n = parse_double(val, line_no);
        if (!(n >= 2) || n != std::floor(n)) parse_error(line_no, "n_cells must be an integer >= 2");
        cfg.n_cells = static_cast<std::size_t>(n);
        have_cells = true;
      } else if (key == "dx") {
        dx = parse_double(val, line_no);
        have_dx = true;
      } else if (key == "bc") {
        if (val == "outflow") cfg.bc = BoundaryKind::Outflow;
        else if (val == "periodic") cfg.bc = BoundaryKind::Periodic;
        else if (val == "dirichlet") cfg.bc = BoundaryKind::Dirichlet;
        else parse_error(line_no, "bc must be outflow, periodic or dirichlet");
      } else if (key == "bc_left_rho") cfg.bc_left_rho = parse_double(val, line_no);
      else if (key == "bc_left_w") cfg.bc_left_w = parse_double(val, line_no);
      else if (key == "bc_right_rho") cfg.bc_right_rho = parse_double(val, line_no);
      else if (key == "bc_right_w") cfg.bc_right_w = parse_double(val, line_no);
      else unknown();
    } else if (section == "numerics") {
      if (key == "cfl_mode") {
        if (val == "safe") cfg.cfl_mode = CflMode::Safe;
        else if (val == "paper") cfg.cfl_mode = CflMode::FixedVmax;
        else parse_error(line_no, "cfl_mode must be safe or paper");
      } else if (key == "courant") cfg.courant = parse_double(val, line_no);
      else if (key == "t_final") cfg.t_final = parse_double(val, line_no);
      else if (key == "snapshot_every") cfg.snapshot_every = parse_double(val, line_no);
      else if (key == "workers") {
        const double w = parse_double(val, line_no);
        if (!(w >= 1) || w != std::floor(w)) parse_error(line_no, "workers must be a positive integer");
        cfg.workers = static_cast<unsigned>(w);
      } else unknown();
    } else if (section == "initial") {
      if (key == "builtin") {
        const ScenarioConfig b = builtin_scenario(val);
        cfg.builtin = val;
        cfg.rho0 = b.rho0;
        cfg.w0 = b.w0;
      } else if (key == "rho_points") cfg.rho0 = parse_points(val, line_no);
      else if (key == "w_points") cfg.w0 = parse_points(val, line_no);
      else unknown();
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "plot_script") cfg.plot_script = parse_bool(val, line_no);
      else unknown();
    } else {
      parse_error(line_no, "key outside of any section");
    }
  }

  if (have_dx) {
    if (have_cells) fail(ErrorKind::Parse, "give either n_cells or dx, not both");
    const double n = (cfg.x_max - cfg.x_min) / dx;
    if (!(dx > 0) || std::abs(n - std::round(n)) > 1e-9 * n) {
      fail(ErrorKind::Parse, "dx must divide the domain length");
    }
    cfg.n_cells = static_cast<std::size_t>(std::round(n));
  }
  if (cfg.rho0.points.empty() || cfg.w0.points.empty()) {
    fail(ErrorKind::Parse, "[initial] needs builtin or both rho_points and w_points");
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[scenario]\nname = " << cfg.name << "\n\n";
  os << "[model]\n"
     << "R = " << num(cfg.R) << "\n"
     << "v_max = " << num(cfg.v_max) << "\n"
     << "w_min = " << num(cfg.w_min) << "\n"
     << "w_max = " << num(cfg.w_max) << "\n"
     << "psi = " << cfg.psi << "\n\n";
  os << "[grid]\n"
     << "x_min = " << num(cfg.x_min) << "\n"
     << "x_max = " << num(cfg.x_max) << "\n"
     << "n_cells = " << cfg.n_cells << "\n"
     << "bc = " << bc_name(cfg.bc) << "\n"
     << "bc_left_rho = " << num(cfg.bc_left_rho) << "\n"
     << "bc_left_w = " << num(cfg.bc_left_w) << "\n"
     << "bc_right_rho = " << num(cfg.bc_right_rho) << "\n"
     << "bc_right_w = " << num(cfg.bc_right_w) << "\n\n";
  os << "[numerics]\n"
     << "cfl_mode = " << (cfg.cfl_mode == CflMode::Safe ? "safe" : "paper") << "\n"
     << "courant = " << num(cfg.courant) << "\n"
     << "t_final = " << num(cfg.t_final) << "\n"
     << "snapshot_every = " << num(cfg.snapshot_every) << "\n"
     << "workers = " << cfg.workers << "\n\n";
  os << "[initial]\n";
  // Tables are authoritative; builtin is emitted first so they override it.
  if (!cfg.builtin.empty()) os << "builtin = " << cfg.builtin << "\n";
  os << "rho_points = " << emit_points(cfg.rho0) << "\n"
     << "w_points = " << emit_points(cfg.w0) << "\n\n";
  os << "[output]\n"
     << "dir = " << cfg.out_dir << "\n"
     << "plot_script = " << (cfg.plot_script ? "true" : "false") << "\n";
  return os.str();
}

ModelParams model_params(const ScenarioConfig& cfg, Units units) {
  const double k = units == Units::SI ? kKmhToMs : 1.0;
  ModelParams p;
  p.R = cfg.R;
  p.v_max = cfg.v_max * k;
  p.w_min = cfg.w_min * k;
  p.w_max = cfg.w_max * k;
  p.psi = make_psi(cfg.psi, cfg.R);
  return p;
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  ModelParams p;
  try {
    p = model_params(cfg, Units::KmH);
  } catch (const Error& e) {
    out.push_back(e.what());
    return out;
  }
  auto hyp = validate_params(p);
  out.insert(out.end(), hyp.begin(), hyp.end());

  if (!(cfg.x_max > cfg.x_min)) out.push_back("grid: x_max must exceed x_min");
  if (cfg.n_cells < 2) out.push_back("grid: n_cells must be >= 2");
  if (!(cfg.courant > 0 && cfg.courant <= 1)) out.push_back("numerics: courant must lie in (0, 1]");
  if (!(cfg.t_final >= 0)) out.push_back("numerics: t_final must be >= 0");
  if (!(cfg.snapshot_every >= 0)) out.push_back("numerics: snapshot_every must be >= 0");
  if (cfg.workers < 1) out.push_back("numerics: workers must be >= 1");
  if (!out.empty()) return out;

  for (const auto* table : {&cfg.rho0, &cfg.w0}) {
    for (std::size_t i = 1; i < table->points.size(); ++i) {
      if (table->points[i].first < table->points[i - 1].first) {
        out.push_back("initial: breakpoints must be sorted in x");
        break;
      }
    }
  }
  if (out.empty()) {
    try {
      (void)initial_state(cfg);
    } catch (const Error& e) {
      out.push_back(std::string("initial: ") + e.what());
    }
  }
  return out;
}

SimState initial_state(const ScenarioConfig& cfg) {
  const ModelParams p = model_params(cfg, Units::SI);
  Grid grid{cfg.x_min, cfg.x_max, cfg.n_cells};
  BoundaryCondition bc{cfg.bc, {}, {}};
  if (cfg.bc == BoundaryKind::Dirichlet) {
    bc.left = user_state(cfg.bc_left_rho, cfg.bc_left_w, p);
    bc.right = user_state(cfg.bc_right_rho, cfg.bc_right_w, p);
    require_admissible(bc.left, p, "left boundary");
    require_admissible(bc.right, p, "right boundary");
  }
  const PiecewiseLinear& rho0 = cfg.rho0;
  const PiecewiseLinear& w0 = cfg.w0;
  return init_from_profiles(
      grid, [&](double x) { return rho0(x); },
      [&](double x) { return w0(x) * kKmhToMs; }, p, bc);
}

RunOptions run_options(const ScenarioConfig& cfg) {
  RunOptions opts;
  opts.cfl = {cfg.cfl_mode, cfg.courant};
  opts.snapshot_every = cfg.snapshot_every;
  opts.workers = cfg.workers;
  return opts;
}

RunSummary run_scenario(const ScenarioConfig& cfg) {
  const auto problems = validate_config(cfg);
  if (!problems.empty()) fail(ErrorKind::InvalidArgument, "invalid scenario: " + problems.front());

  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    fail(ErrorKind::Io, "output directory '" + cfg.out_dir + "' does not exist");
  }
  const fs::path fields = dir / "fields.csv";
  const fs::path fields_tmp = dir / "fields.csv.partial";

  SimState s = initial_state(cfg);
  const ModelParams& p = s.params;
  const double dx = s.grid.dx();
  const double to_kmh = 1.0 / kKmhToMs;

  std::FILE* out = std::fopen(fields_tmp.c_str(), "w");
  if (!out) fail(ErrorKind::Io, "cannot write '" + fields_tmp.string() + "'");

  RunSummary summary;
  summary.min_w = std::numeric_limits<double>::infinity();
  summary.max_w = -std::numeric_limits<double>::infinity();
  summary.min_rho = std::numeric_limits<double>::infinity();
  summary.max_rho = -std::numeric_limits<double>::infinity();
  std::vector<std::array<double, 3>> masses;

  std::fputs("t,x,rho,eta,w,v\n", out);
  auto sink = [&](double t, const std::vector<State>& cells) {
    double m_rho = 0.0;
    double m_eta = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const State& u = cells[j];
      const bool vac = is_vacuum(u, p);
      const double w = vac ? 0.0 : u.eta / u.rho * to_kmh;
      const double v = velocity(u, p) * to_kmh;
      std::fprintf(out, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", t, s.grid.center(j), u.rho,
                   u.eta * to_kmh, w, v);
      m_rho += u.rho * dx;
      m_eta += u.eta * to_kmh * dx;
      summary.min_rho = std::min(summary.min_rho, u.rho);
      summary.max_rho = std::max(summary.max_rho, u.rho);
      if (!vac) {
        summary.min_w = std::min(summary.min_w, w);
        summary.max_w = std::max(summary.max_w, w);
      }
    }
    masses.push_back({t, m_rho, m_eta});
    ++summary.snapshots;
  };

  const auto start = std::chrono::steady_clock::now();
  try {
    summary.stats = run(s, cfg.t_final, run_options(cfg), sink);
  } catch (...) {
    std::fclose(out);
    fs::remove(fields_tmp, ec);
    throw;
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (std::fclose(out) != 0) {
    fs::remove(fields_tmp, ec);
    fail(ErrorKind::Io, "failed writing '" + fields_tmp.string() + "'");
  }
  fs::rename(fields_tmp, fields, ec);
  if (ec) fail(ErrorKind::Io, "cannot move fields.csv into place: " + ec.message());
  summary.mass_initial = masses.front()[1];
  summary.mass_final = masses.back()[1];

  std::ofstream sum(dir / "summary.txt");
  if (!sum) fail(ErrorKind::Io, "cannot write summary.txt");
  sum.precision(12);
  sum << "scenario: " << (cfg.name.empty() ? "(unnamed)" : cfg.name) << "\n"
      << "cells: " << cfg.n_cells << "  dx_m: " << dx << "\n"
      << "cfl_mode: " << (cfg.cfl_mode == CflMode::Safe ? "safe" : "paper")
      << "  courant: " << cfg.courant << "  dt_s: " << stable_dt(initial_state(cfg), run_options(cfg).cfl)
      << "\n"
      << "steps: " << summary.stats.steps << "\n"
      << "snapshots: " << summary.snapshots << "\n"
      << "wall_time_s: " << summary.wall_seconds << "\n"
      << "min_w_kmh: " << summary.min_w << "  max_w_kmh: " << summary.max_w << "\n"
      << "min_rho: " << summary.min_rho << "  max_rho: " << summary.max_rho << "\n"
      << "max_clamped_rho_excess: " << summary.stats.rho_violation
      << "  max_clamped_w_excess: " << summary.stats.w_violation << "\n"
      << "\n# mass time series: t_s, int rho dx, int eta dx (km/h m)\n";
  for (const auto& [t, mr, me] : masses) sum << t << " " << mr << " " << me << "\n";

  if (cfg.plot_script) {
    std::ofstream gp(dir / "plot.gp");
    if (!gp) fail(ErrorKind::Io, "cannot write plot.gp");
    gp << "# gnuplot -c plot.gp  (run inside this directory)\n"
          "set datafile separator ','\n"
          "set terminal pngcairo size 1000,700\n"
          "set xlabel 'x [m]'\n"
          "set ylabel 't [s]'\n"
          "set palette rgbformulae 33,13,10\n"
          "set output 'rho.png'\n"
          "set title 'density'\n"
          "set cbrange [0:"
       << num(cfg.R)
       << "]\n"
          "plot 'fields.csv' every ::1 using 2:1:3 with points pt 5 ps 0.15 lc palette notitle\n"
          "set output 'w.png'\n"
          "set title 'w [km/h] (0 = vacuum)'\n"
          "set cbrange [*:*]\n"
          "plot 'fields.csv' every ::1 using 2:1:5 with points pt 5 ps 0.15 lc palette notitle\n";
  }
  return summary;
}

}  // namespace twophase::scenario
