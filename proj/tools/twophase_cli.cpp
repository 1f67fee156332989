// twophase: command-line front end over the C API.
//
//   twophase run <config> | --builtin esN [--cells N] [--cfl-mode safe|paper]
//                [--courant c] [--out DIR] [--workers K]
//   twophase riemann --left rho,eta --right rho,eta [--params FILE | --builtin es1]
//                    [--format text|csv]
//   twophase compare [--pairs FILE] [--params FILE]
//   twophase validate <config>
//
// Exit codes: 0 success, 1 usage or invalid input, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twophase/twophase.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct ScenarioDeleter {
  void operator()(tp_scenario* s) const { tp_scenario_free(s); }
};
struct ModelDeleter {
  void operator()(tp_model* m) const { tp_model_free(m); }
};
using ScenarioPtr = std::unique_ptr<tp_scenario, ScenarioDeleter>;
using ModelPtr = std::unique_ptr<tp_model, ModelDeleter>;

int report(tp_status st) {
  std::fprintf(stderr, "twophase: %s: %s\n", tp_status_name(st), tp_last_error());
  return st == TP_ERR_NUMERICAL ? kExitNumerical : kExitUsage;
}

int usage(const std::string& msg) {
  std::fprintf(stderr, "twophase: %s\n", msg.c_str());
  return kExitUsage;
}

bool parse_state(const std::string& text, tp_state& out) {
  std::istringstream ss(text);
  char comma = 0;
  std::string rest;
  if (!(ss >> out.rho >> comma >> out.eta) || comma != ',' || (ss >> rest)) return false;
  return true;
}

// Either a config path or a built-in name.
tp_status load_scenario(const std::string& path, const std::string& builtin, ScenarioPtr& out) {
  tp_scenario* raw = nullptr;
  const tp_status st =
      builtin.empty() ? tp_scenario_load(path.c_str(), &raw) : tp_scenario_builtin(builtin.c_str(), &raw);
  out.reset(raw);
  return st;
}

std::string fetch_text(const std::function<tp_status(char*, size_t, size_t*)>& get,
                       tp_status& st) {
  size_t needed = 0;
  st = get(nullptr, 0, &needed);
  if (st != TP_OK && st != TP_ERR_BUFFER_TOO_SMALL) return {};
  std::string buf(needed, '\0');
  st = get(buf.data(), buf.size(), &needed);
  buf.resize(needed ? needed - 1 : 0);
  return buf;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string show(const tp_state& u) { return "(" + fmt(u.rho) + ", " + fmt(u.eta) + ")"; }

struct RunArgs {
  std::string config;
  std::string builtin;
  size_t cells = 0;
  std::string cfl_mode;
  double courant = 0.0;
  std::string out;
  unsigned workers = 0;
  double t_final = -1.0;
};

int cmd_run(const RunArgs& a) {
  if (a.config.empty() == a.builtin.empty()) return usage("run needs exactly one of <config> or --builtin");
  ScenarioPtr sc;
  if (tp_status st = load_scenario(a.config, a.builtin, sc); st != TP_OK) return report(st);
  tp_status st = TP_OK;
  if (a.cells) st = tp_scenario_set_cells(sc.get(), a.cells);
  if (st == TP_OK && !a.cfl_mode.empty()) {
    if (a.cfl_mode != "safe" && a.cfl_mode != "paper") return usage("--cfl-mode must be safe or paper");
    st = tp_scenario_set_cfl_mode(sc.get(), a.cfl_mode == "safe" ? TP_CFL_SAFE : TP_CFL_FIXED_VMAX);
  }
  if (st == TP_OK && a.courant != 0.0) st = tp_scenario_set_courant(sc.get(), a.courant);
  if (st == TP_OK && !a.out.empty()) st = tp_scenario_set_out_dir(sc.get(), a.out.c_str());
  if (st == TP_OK && a.workers) st = tp_scenario_set_workers(sc.get(), a.workers);
  if (st == TP_OK && a.t_final >= 0.0) st = tp_scenario_set_t_final(sc.get(), a.t_final);
  if (st != TP_OK) return report(st);

  tp_run_summary sum{};
  if (st = tp_scenario_run(sc.get(), &sum); st != TP_OK) return report(st);
  std::printf("steps %zu, snapshots %zu, wall %.3f s\n", sum.steps, sum.snapshots, sum.wall_seconds);
  std::printf("rho in [%.9g, %.9g], w in [%.9g, %.9g] km/h\n", sum.min_rho, sum.max_rho, sum.min_w,
              sum.max_w);
  std::printf("mass %.12g -> %.12g\n", sum.mass_initial, sum.mass_final);
  return kExitOk;
}

struct RiemannArgs {
  std::string left, right, params, builtin, format = "text";
};

int cmd_riemann(const RiemannArgs& a) {
  tp_state ul{}, ur{};
  if (!parse_state(a.left, ul)) return usage("--left expects rho,eta");
  if (!parse_state(a.right, ur)) return usage("--right expects rho,eta");
  if (!a.params.empty() && !a.builtin.empty()) return usage("give --params or --builtin, not both");
  ScenarioPtr sc;
  tp_status st = load_scenario(a.params, a.params.empty() && a.builtin.empty() ? "es1" : a.builtin, sc);
  if (st != TP_OK) return report(st);
  tp_model* raw = nullptr;
  if (st = tp_scenario_model(sc.get(), 1, &raw); st != TP_OK) return report(st);
  ModelPtr model(raw);

  tp_fan fan{};
  if (st = tp_riemann_solve(model.get(), ul, ur, &fan); st != TP_OK) return report(st);
  tp_state f{};
  if (st = tp_godunov_flux(model.get(), ul, ur, &f); st != TP_OK) return report(st);

  const bool has_middle = fan.n_waves == 2;
  const tp_state middle = has_middle ? fan.waves[0].right : tp_state{};
  if (a.format == "csv") {
    std::printf("record,kind,rho_l,eta_l,rho_r,eta_r,speed_lo,speed_hi\n");
    for (size_t i = 0; i < fan.n_waves; ++i) {
      const tp_wave& w = fan.waves[i];
      std::printf("wave,%s,%s,%s,%s,%s,%s,%s\n", tp_wave_kind_name(w.kind), fmt(w.left.rho).c_str(),
                  fmt(w.left.eta).c_str(), fmt(w.right.rho).c_str(), fmt(w.right.eta).c_str(),
                  fmt(w.speed_lo).c_str(), fmt(w.speed_hi).c_str());
    }
    if (has_middle) {
      std::printf("middle,,%s,%s,,,,\n", fmt(middle.rho).c_str(), fmt(middle.eta).c_str());
    }
    std::printf("flux,,%s,%s,,,,\n", fmt(f.rho).c_str(), fmt(f.eta).c_str());
    return kExitOk;
  }
  if (a.format != "text") return usage("--format must be text or csv");
  if (fan.n_waves == 0) std::printf("no waves\n");
  for (size_t i = 0; i < fan.n_waves; ++i) {
    const tp_wave& w = fan.waves[i];
    std::printf("wave %zu: %-16s %s -> %s  ", i + 1, tp_wave_kind_name(w.kind), show(w.left).c_str(),
                show(w.right).c_str());
    if (w.kind == TP_WAVE_RAREFACTION1) {
      std::printf("speeds [%s, %s]\n", fmt(w.speed_lo).c_str(), fmt(w.speed_hi).c_str());
    } else {
      std::printf("speed %s\n", fmt(w.speed_lo).c_str());
    }
  }
  if (has_middle) std::printf("middle state: %s\n", show(middle).c_str());
  std::printf("godunov flux: %s\n", show(f).c_str());
  return kExitOk;
}

bool parse_pair_line(const std::string& line, tp_pair& out) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() != 5) return false;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  const std::string model = trim(fields[0]);
  if (model == "cmr") {
    out.model = TP_MODEL_CMR;
  } else if (model == "bwgpb") {
    out.model = TP_MODEL_BWGPB;
  } else {
    return false;
  }
  double* dst[] = {&out.rho_l, &out.aux_l, &out.rho_r, &out.aux_r};
  for (int i = 0; i < 4; ++i) {
    try {
      size_t used = 0;
      const std::string t = trim(fields[i + 1]);
      *dst[i] = std::stod(t, &used);
      if (used != t.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

int cmd_compare(const std::string& pairs_path, const std::string& params_path) {
  std::vector<tp_pair> pairs;
  if (pairs_path.empty()) {
    pairs.resize(tp_demo_pairs(nullptr, 0));
    tp_demo_pairs(pairs.data(), pairs.size());
  } else {
    std::ifstream in(pairs_path);
    if (!in) return usage("cannot open pairs file '" + pairs_path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (line.rfind("model", 0) == 0) continue;
      tp_pair p{};
      if (!parse_pair_line(line, p)) {
        return usage("pairs file line " + std::to_string(line_no) +
                     ": expected model,rho_l,aux_l,rho_r,aux_r with model cmr or bwgpb");
      }
      pairs.push_back(p);
    }
  }

  ScenarioPtr sc;
  tp_status st = load_scenario(params_path, params_path.empty() ? "es1" : "", sc);
  if (st != TP_OK) return report(st);
  tp_model* raw = nullptr;
  if (st = tp_scenario_model(sc.get(), 1, &raw); st != TP_OK) return report(st);
  ModelPtr model(raw);
  const tp_bw_params bw = tp_bw_default_params();

  std::vector<tp_count_row> rows(pairs.size());
  if (st = tp_compare(model.get(), &bw, pairs.data(), pairs.size(), rows.data()); st != TP_OK) {
    return report(st);
  }
  std::printf("model,rho_l,aux_l,rho_r,aux_r,n_waves\n");
  int bad = 0;
  for (const tp_count_row& r : rows) {
    const char* name = r.pair.model == TP_MODEL_CMR ? "cmr" : "bwgpb";
    std::printf("%s,%s,%s,%s,%s,", name, fmt(r.pair.rho_l).c_str(), fmt(r.pair.aux_l).c_str(),
                fmt(r.pair.rho_r).c_str(), fmt(r.pair.aux_r).c_str());
    if (r.n_waves < 0) {
      std::printf("error\n");
      std::fprintf(stderr, "twophase: %s pair failed: %s\n", name, r.error);
      ++bad;
    } else {
      std::printf("%d\n", r.n_waves);
      if (!r.ok) {
        std::fprintf(stderr, "twophase: %s pair has %d waves, above the model bound\n", name,
                     r.n_waves);
        ++bad;
      }
    }
  }
  return bad ? kExitUsage : kExitOk;
}

int cmd_validate(const std::string& path) {
  ScenarioPtr sc;
  if (tp_status st = load_scenario(path, "", sc); st != TP_OK) return report(st);
  size_t n = 0;
  tp_status st = TP_OK;
  const std::string text = fetch_text(
      [&](char* b, size_t cap, size_t* need) { return tp_scenario_validate(sc.get(), b, cap, need, &n); },
      st);
  if (st != TP_OK) return report(st);
  if (n == 0) {
    std::printf("ok\n");
    return kExitOk;
  }
  std::fputs(text.c_str(), stdout);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Godunov solver and exact Riemann solver for the 2-phase traffic model"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "simulate a scenario and write fields.csv, summary.txt, plot.gp");
  run->add_option("config", run_args.config, "scenario config file");
  run->add_option("--builtin", run_args.builtin, "built-in scenario: es1, es2 or es3");
  run->add_option("--cells", run_args.cells, "number of cells")->check(CLI::Range(size_t{2}, size_t{1} << 40));
  run->add_option("--cfl-mode", run_args.cfl_mode, "safe or paper")->check(CLI::IsMember({"safe", "paper"}));
  run->add_option("--courant", run_args.courant, "Courant number in (0, 1]");
  run->add_option("--out", run_args.out, "existing output directory");
  run->add_option("--workers", run_args.workers, "flux worker threads")->check(CLI::PositiveNumber);
  run->add_option("--t-final", run_args.t_final, "final time in seconds");

  RiemannArgs rm_args;
  auto* rm = app.add_subcommand("riemann", "solve one Riemann problem (speeds in km/h)");
  rm->add_option("--left", rm_args.left, "left state rho,eta")->required();
  rm->add_option("--right", rm_args.right, "right state rho,eta")->required();
  rm->add_option("--params", rm_args.params, "config file supplying the model constants");
  rm->add_option("--builtin", rm_args.builtin, "built-in scenario supplying the constants (default es1)");
  rm->add_option("--format", rm_args.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  std::string pairs_path, cmp_params;
  auto* cmp = app.add_subcommand("compare", "wave counts of both phase-transition models");
  cmp->add_option("--pairs", pairs_path, "CSV of model,rho_l,aux_l,rho_r,aux_r (default: demo pairs)");
  cmp->add_option("--params", cmp_params, "config file for the 2-phase model constants (default es1)");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a scenario config");
  val->add_option("config", validate_path, "scenario config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(run_args);
  if (*rm) return cmd_riemann(rm_args);
  if (*cmp) return cmd_compare(pairs_path, cmp_params);
  if (*val) return cmd_validate(validate_path);
  return kExitUsage;
}
