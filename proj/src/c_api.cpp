#include "twophase/twophase.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "twophase/bwgpb.hpp"
#include "twophase/error.hpp"
#include "twophase/godunov.hpp"
#include "twophase/model.hpp"
#include "twophase/riemann.hpp"
#include "twophase/scenario.hpp"

struct tp_model {
  twophase::ModelParams params;
};

struct tp_scenario {
  twophase::scenario::ScenarioConfig cfg;
};

struct tp_sim {
  twophase::SimState state;
  twophase::CflPolicy cfl;
  unsigned workers = 1;
};

namespace {

using namespace twophase;

thread_local std::string g_last_error;

tp_status set_error(tp_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

tp_status from_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return TP_ERR_INVALID_ARGUMENT;
    case ErrorKind::Numerical:
      return TP_ERR_NUMERICAL;
    case ErrorKind::Io:
      return TP_ERR_IO;
    case ErrorKind::Parse:
      return TP_ERR_PARSE;
  }
  return TP_ERR_INTERNAL;
}

template <class F>
tp_status guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return set_error(from_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TP_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(TP_ERR_INTERNAL, "unknown error");
  }
}

#define TP_REQUIRE(cond, what) \
  if (!(cond)) return set_error(TP_ERR_INVALID_ARGUMENT, what)

tp_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (cap == 0 || !buf) return set_error(TP_ERR_BUFFER_TOO_SMALL, "output buffer too small");
  const size_t n = std::min(cap - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
  if (cap < s.size() + 1) return set_error(TP_ERR_BUFFER_TOO_SMALL, "output buffer too small");
  return TP_OK;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

State to_cpp(tp_state u) { return {u.rho, u.eta}; }
tp_state to_c(const State& u) { return {u.rho, u.eta}; }
bwgpb::State to_cpp(tp_bw_state u) { return {u.rho, u.q}; }
tp_bw_state to_c(const bwgpb::State& u) { return {u.rho, u.q}; }

bwgpb::Params to_cpp(const tp_bw_params& p) {
  return {p.R, p.V, p.sigma, p.sigma_plus, p.q_minus, p.q_plus};
}

tp_wave_kind to_c(WaveKind k) { return static_cast<tp_wave_kind>(static_cast<int>(k)); }

}  // namespace

extern "C" {

const char* tp_last_error(void) { return g_last_error.c_str(); }

const char* tp_status_name(tp_status status) {
  switch (status) {
    case TP_OK:
      return "ok";
    case TP_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case TP_ERR_NUMERICAL:
      return "numerical failure";
    case TP_ERR_IO:
      return "i/o error";
    case TP_ERR_PARSE:
      return "parse error";
    case TP_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case TP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* tp_version(void) { return "1.0.0"; }

tp_status tp_model_create(double R, double v_max, double w_min, double w_max, const char* psi,
                          tp_model** out) {
  TP_REQUIRE(out && psi, "null argument");
  return guard([&] {
    ModelParams p;
    p.R = R;
    p.v_max = v_max;
    p.w_min = w_min;
    p.w_max = w_max;
    const std::string name(psi);
    if (name == "linear") {
      p.psi = SpeedProfile::linear(R);
    } else if (name == "quadratic") {
      p.psi = SpeedProfile::quadratic(R);
    } else {
      fail(ErrorKind::InvalidArgument, "unknown speed profile '" + name + "'");
    }
    *out = new tp_model{std::move(p)};
    return TP_OK;
  });
}

void tp_model_free(tp_model* model) { delete model; }

tp_status tp_model_validate(const tp_model* model, char* buf, size_t cap, size_t* needed,
                            size_t* n_problems) {
  TP_REQUIRE(model, "null model");
  return guard([&] {
    const auto problems = validate_params(model->params);
    if (n_problems) *n_problems = problems.size();
    return copy_out(join_lines(problems), buf, cap, needed);
  });
}

tp_status tp_velocity(const tp_model* model, tp_state u, double* v) {
  TP_REQUIRE(model && v, "null argument");
  return guard([&] {
    require_admissible(to_cpp(u), model->params, "state");
    *v = velocity(to_cpp(u), model->params);
    return TP_OK;
  });
}

tp_status tp_classify(const tp_model* model, tp_state u, tp_phase* phase) {
  TP_REQUIRE(model && phase, "null argument");
  return guard([&] {
    require_admissible(to_cpp(u), model->params, "state");
    *phase = static_cast<tp_phase>(static_cast<int>(classify(to_cpp(u), model->params)));
    return TP_OK;
  });
}

tp_status tp_flux(const tp_model* model, tp_state u, tp_state* f) {
  TP_REQUIRE(model && f, "null argument");
  return guard([&] {
    require_admissible(to_cpp(u), model->params, "state");
    *f = to_c(flux(to_cpp(u), model->params));
    return TP_OK;
  });
}

const char* tp_wave_kind_name(tp_wave_kind kind) {
  if (kind < TP_WAVE_LINEAR || kind > TP_WAVE_CONTACT2) return "unknown";
  return wave_kind_name(static_cast<WaveKind>(kind));
}

const char* tp_phase_name(tp_phase phase) {
  if (phase < TP_PHASE_FREE || phase > TP_PHASE_VACUUM) return "unknown";
  return twophase::phase_name(static_cast<Phase>(phase));
}

tp_status tp_riemann_solve(const tp_model* model, tp_state left, tp_state right, tp_fan* out) {
  TP_REQUIRE(model && out, "null argument");
  return guard([&] {
    const WaveFan fan = solve(to_cpp(left), to_cpp(right), model->params);
    if (fan.waves.size() > TP_MAX_WAVES) fail(ErrorKind::Numerical, "too many waves");
    *out = tp_fan{};
    out->n_waves = fan.waves.size();
    for (size_t i = 0; i < fan.waves.size(); ++i) {
      const Wave& w = fan.waves[i];
      out->waves[i] = {to_c(w.kind), to_c(w.left), to_c(w.right), w.speed_lo, w.speed_hi};
    }
    return TP_OK;
  });
}

tp_status tp_riemann_sample(const tp_model* model, tp_state left, tp_state right, double xi,
                            tp_state* out) {
  TP_REQUIRE(model && out, "null argument");
  return guard([&] {
    *out = to_c(sample(solve(to_cpp(left), to_cpp(right), model->params), xi));
    return TP_OK;
  });
}

tp_status tp_godunov_flux(const tp_model* model, tp_state left, tp_state right, tp_state* flux) {
  TP_REQUIRE(model && flux, "null argument");
  return guard([&] {
    const NumericalFlux f = godunov_flux(to_cpp(left), to_cpp(right), model->params);
    *flux = {f.rho, f.eta};
    return TP_OK;
  });
}

tp_status tp_scenario_builtin(const char* name, tp_scenario** out) {
  TP_REQUIRE(name && out, "null argument");
  return guard([&] {
    *out = new tp_scenario{scenario::builtin_scenario(name)};
    return TP_OK;
  });
}

tp_status tp_scenario_load(const char* path, tp_scenario** out) {
  TP_REQUIRE(path && out, "null argument");
  return guard([&] {
    *out = new tp_scenario{scenario::load_config(path)};
    return TP_OK;
  });
}

tp_status tp_scenario_parse(const char* text, tp_scenario** out) {
  TP_REQUIRE(text && out, "null argument");
  return guard([&] {
    *out = new tp_scenario{scenario::parse_config(text)};
    return TP_OK;
  });
}

void tp_scenario_free(tp_scenario* scenario) { delete scenario; }

tp_status tp_scenario_emit(const tp_scenario* scenario, char* buf, size_t cap, size_t* needed) {
  TP_REQUIRE(scenario, "null scenario");
  return guard([&] { return copy_out(scenario::emit_config(scenario->cfg), buf, cap, needed); });
}

tp_status tp_scenario_equal(const tp_scenario* a, const tp_scenario* b, int* equal) {
  TP_REQUIRE(a && b && equal, "null argument");
  *equal = a->cfg == b->cfg ? 1 : 0;
  return TP_OK;
}

tp_status tp_scenario_set_cells(tp_scenario* scenario, size_t n_cells) {
  TP_REQUIRE(scenario, "null scenario");
  TP_REQUIRE(n_cells >= 2, "n_cells must be >= 2");
  scenario->cfg.n_cells = n_cells;
  return TP_OK;
}

tp_status tp_scenario_set_cfl_mode(tp_scenario* scenario, tp_cfl_mode mode) {
  TP_REQUIRE(scenario, "null scenario");
  TP_REQUIRE(mode == TP_CFL_SAFE || mode == TP_CFL_FIXED_VMAX, "unknown CFL mode");
  scenario->cfg.cfl_mode = mode == TP_CFL_SAFE ? CflMode::Safe : CflMode::FixedVmax;
  return TP_OK;
}

tp_status tp_scenario_set_courant(tp_scenario* scenario, double courant) {
  TP_REQUIRE(scenario, "null scenario");
  TP_REQUIRE(courant > 0.0 && courant <= 1.0, "Courant number must lie in (0, 1]");
  scenario->cfg.courant = courant;
  return TP_OK;
}

tp_status tp_scenario_set_cfl(tp_scenario* scenario, tp_cfl_mode mode, double courant) {
  const tp_status st = tp_scenario_set_cfl_mode(scenario, mode);
  return st != TP_OK ? st : tp_scenario_set_courant(scenario, courant);
}

tp_status tp_scenario_set_t_final(tp_scenario* scenario, double t_final) {
  TP_REQUIRE(scenario, "null scenario");
  TP_REQUIRE(t_final >= 0.0, "t_final must be >= 0");
  scenario->cfg.t_final = t_final;
  return TP_OK;
}

tp_status tp_scenario_set_snapshot_every(tp_scenario* scenario, double every) {
  TP_REQUIRE(scenario, "null scenario");
  TP_REQUIRE(every >= 0.0, "snapshot interval must be >= 0");
  scenario->cfg.snapshot_every = every;
  return TP_OK;
}

tp_status tp_scenario_set_workers(tp_scenario* scenario, unsigned workers) {
  TP_REQUIRE(scenario, "null scenario");
  TP_REQUIRE(workers >= 1, "workers must be >= 1");
  scenario->cfg.workers = workers;
  return TP_OK;
}

tp_status tp_scenario_set_out_dir(tp_scenario* scenario, const char* dir) {
  TP_REQUIRE(scenario && dir, "null argument");
  return guard([&] {
    scenario->cfg.out_dir = dir;
    return TP_OK;
  });
}

tp_status tp_scenario_model(const tp_scenario* scenario, int kmh, tp_model** out) {
  TP_REQUIRE(scenario && out, "null argument");
  return guard([&] {
    const auto units = kmh ? scenario::Units::KmH : scenario::Units::SI;
    *out = new tp_model{scenario::model_params(scenario->cfg, units)};
    return TP_OK;
  });
}

tp_status tp_scenario_validate(const tp_scenario* scenario, char* buf, size_t cap, size_t* needed,
                               size_t* n_problems) {
  TP_REQUIRE(scenario, "null scenario");
  return guard([&] {
    const auto problems = scenario::validate_config(scenario->cfg);
    if (n_problems) *n_problems = problems.size();
    return copy_out(join_lines(problems), buf, cap, needed);
  });
}

tp_status tp_scenario_run(const tp_scenario* scenario, tp_run_summary* summary) {
  TP_REQUIRE(scenario, "null scenario");
  return guard([&] {
    const scenario::RunSummary s = scenario::run_scenario(scenario->cfg);
    if (summary) {
      *summary = {s.stats.steps,     s.snapshots,           s.wall_seconds,
                  s.min_w,           s.max_w,               s.min_rho,
                  s.max_rho,         s.mass_initial,        s.mass_final,
                  s.stats.rho_violation, s.stats.w_violation};
    }
    return TP_OK;
  });
}

tp_status tp_sim_create(const tp_scenario* scenario, tp_sim** out) {
  TP_REQUIRE(scenario && out, "null argument");
  return guard([&] {
    const auto opts = scenario::run_options(scenario->cfg);
    *out = new tp_sim{scenario::initial_state(scenario->cfg), opts.cfl, opts.workers};
    return TP_OK;
  });
}

void tp_sim_free(tp_sim* sim) { delete sim; }

tp_status tp_sim_stable_dt(const tp_sim* sim, double* dt) {
  TP_REQUIRE(sim && dt, "null argument");
  return guard([&] {
    *dt = stable_dt(sim->state, sim->cfl);
    return TP_OK;
  });
}

tp_status tp_sim_step(tp_sim* sim, double dt) {
  TP_REQUIRE(sim, "null sim");
  return guard([&] {
    step(sim->state, dt, StepOptions{true, sim->workers});
    return TP_OK;
  });
}

tp_status tp_sim_time(const tp_sim* sim, double* t) {
  TP_REQUIRE(sim && t, "null argument");
  *t = sim->state.t;
  return TP_OK;
}

tp_status tp_sim_dx(const tp_sim* sim, double* dx) {
  TP_REQUIRE(sim && dx, "null argument");
  *dx = sim->state.grid.dx();
  return TP_OK;
}

tp_status tp_sim_cells(const tp_sim* sim, tp_state* buf, size_t cap, size_t* n_cells) {
  TP_REQUIRE(sim && n_cells, "null argument");
  const auto& cells = sim->state.cells;
  *n_cells = cells.size();
  if (cap < cells.size() || !buf) return set_error(TP_ERR_BUFFER_TOO_SMALL, "cell buffer too small");
  for (size_t j = 0; j < cells.size(); ++j) buf[j] = to_c(cells[j]);
  return TP_OK;
}

tp_bw_params tp_bw_default_params(void) {
  const bwgpb::Params p;
  return {p.R, p.V, p.sigma, p.sigma_plus, p.q_minus, p.q_plus};
}

tp_status tp_bw_solve(const tp_bw_params* params, tp_bw_state left, tp_bw_state right,
                      tp_bw_solution* out) {
  TP_REQUIRE(params && out, "null argument");
  return guard([&] {
    const bwgpb::Solution sol = bwgpb::solve(to_cpp(left), to_cpp(right), to_cpp(*params));
    if (sol.waves.size() > TP_MAX_WAVES) fail(ErrorKind::Numerical, "too many waves");
    *out = tp_bw_solution{};
    out->n_waves = sol.waves.size();
    for (size_t i = 0; i < sol.waves.size(); ++i) {
      const bwgpb::Wave& w = sol.waves[i];
      out->waves[i] = {to_c(w.kind), to_c(w.left), to_c(w.right), w.speed_lo, w.speed_hi};
    }
    out->middle = to_c(sol.middle);
    out->pt_speed_to_middle = sol.pt_speed_to_middle;
    out->lambda1_middle = sol.lambda1_middle;
    out->sonic_case = sol.sonic_case ? 1 : 0;
    return TP_OK;
  });
}

size_t tp_demo_pairs(tp_pair* buf, size_t cap) {
  const auto pairs = bwgpb::demo_pairs();
  for (size_t i = 0; i < pairs.size() && i < cap && buf; ++i) {
    const auto& p = pairs[i];
    buf[i] = {p.model == bwgpb::Model::Cmr ? TP_MODEL_CMR : TP_MODEL_BWGPB, p.rho_l, p.aux_l,
              p.rho_r, p.aux_r};
  }
  return pairs.size();
}

tp_status tp_compare(const tp_model* cmr, const tp_bw_params* bw, const tp_pair* pairs, size_t n,
                     tp_count_row* rows) {
  TP_REQUIRE(cmr && bw && (n == 0 || (pairs && rows)), "null argument");
  return guard([&] {
    std::vector<bwgpb::PairSpec> specs;
    specs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      const tp_pair& p = pairs[i];
      if (p.model != TP_MODEL_CMR && p.model != TP_MODEL_BWGPB) {
        fail(ErrorKind::InvalidArgument, "unknown model in pair " + std::to_string(i));
      }
      specs.push_back({p.model == TP_MODEL_CMR ? bwgpb::Model::Cmr : bwgpb::Model::Bwgpb,
                       p.rho_l, p.aux_l, p.rho_r, p.aux_r});
    }
    const auto result = bwgpb::compare_wave_counts(specs, cmr->params, to_cpp(*bw));
    for (size_t i = 0; i < n; ++i) {
      rows[i] = tp_count_row{};
      rows[i].pair = pairs[i];
      rows[i].n_waves = result[i].n_waves;
      rows[i].ok = result[i].ok ? 1 : 0;
      std::strncpy(rows[i].error, result[i].error.c_str(), sizeof rows[i].error - 1);
    }
    return TP_OK;
  });
}

}  // extern "C"
