#include "pubgood.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "pubgood/agent.hpp"
#include "pubgood/model.hpp"
#include "pubgood/oracle.hpp"
#include "pubgood/planner.hpp"
#include "pubgood/scenario_io.hpp"
#include "pubgood/sim.hpp"

using namespace pubgood;

extern "C" {

struct pg_scenario {
  ScenarioFile file;
  mutable std::optional<ValidatedScenario> validated;
};

struct pg_run {
  RunOutput output;
};

struct pg_oracle {
  OracleResult result;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

pg_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return PG_ERR_INVALID_ARG;
    case ErrorCode::Parse: return PG_ERR_PARSE;
    case ErrorCode::Validation: return PG_ERR_VALIDATION;
    case ErrorCode::Domain: return PG_ERR_DOMAIN;
    case ErrorCode::Numerical: return PG_ERR_NUMERIC;
    case ErrorCode::Index: return PG_ERR_INDEX;
    case ErrorCode::Length: return PG_ERR_LENGTH;
    case ErrorCode::Bracket: return PG_ERR_BRACKET;
    case ErrorCode::TooLarge: return PG_ERR_TOO_LARGE;
    case ErrorCode::Io: return PG_ERR_IO;
  }
  return PG_ERR_INTERNAL;
}

pg_status fail(pg_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
pg_status guarded(Fn&& fn) {
  try {
    fn();
    return PG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PG_ERR_INTERNAL;
  }
}

const ValidatedScenario& ensure_validated(const pg_scenario* s) {
  if (!s->validated) s->validated = validate_scenario(s->file.scenario);
  return *s->validated;
}

char* copy_string(const std::string& str) {
  char* out = static_cast<char*>(std::malloc(str.size() + 1));
  std::memcpy(out, str.c_str(), str.size() + 1);
  return out;
}

RunOptions to_core_options(const pg_scenario* s, const pg_run_options* opts) {
  RunOptions core;
  if (!opts) return s->file.run_options();
  core.max_iters = opts->max_iters;
  core.term.window = opts->window;
  if (opts->eps_feasible >= 0.0) core.term.eps_feasible = opts->eps_feasible;
  if (opts->eps_coherence >= 0.0) core.term.eps_coherence = opts->eps_coherence;
  core.term.eps_stall = opts->eps_stall;
  core.mu_step_scale = opts->mu_step_scale;
  if (opts->mu0) core.mu0 = std::vector<double>(opts->mu0, opts->mu0 + opts->mu0_len);
  return core;
}

pg_status copy_vector(const std::vector<double>& v, double* out, size_t len) {
  if (!out) return fail(PG_ERR_INVALID_ARG, "null output buffer");
  if (len != v.size()) return fail(PG_ERR_LENGTH, "output buffer has wrong length");
  std::memcpy(out, v.data(), v.size() * sizeof(double));
  return PG_OK;
}

}  // namespace

extern "C" {

const char* pg_version(void) { return "1.0.0"; }

const char* pg_last_error(void) { return g_last_error.c_str(); }

void pg_string_free(char* s) { std::free(s); }

pg_status pg_scenario_create(double L, double stepsize_r, pg_scenario** out) {
  if (!out) return fail(PG_ERR_INVALID_ARG, "null output handle");
  auto* s = new pg_scenario();
  s->file.scenario.L = L;
  s->file.scenario.stepsize.r = stepsize_r;
  *out = s;
  return PG_OK;
}

pg_status pg_scenario_add_agent_log_log(pg_scenario* s, double alpha, double w, double a,
                                        double b, double c) {
  if (!s) return fail(PG_ERR_INVALID_ARG, "null scenario");
  AgentSpec spec;
  spec.alpha = alpha;
  spec.w = w;
  spec.utility = UtilitySpec::log_log(a, b, c);
  s->file.scenario.agents.push_back(std::move(spec));
  s->validated.reset();
  return PG_OK;
}

pg_status pg_scenario_add_agent_quad_log(pg_scenario* s, double alpha, double w, double a,
                                         double p, double b, double c) {
  if (!s) return fail(PG_ERR_INVALID_ARG, "null scenario");
  AgentSpec spec;
  spec.alpha = alpha;
  spec.w = w;
  spec.utility = UtilitySpec::quad_log(a, p, b, c);
  s->file.scenario.agents.push_back(std::move(spec));
  s->validated.reset();
  return PG_OK;
}

pg_status pg_scenario_add_agent_external(pg_scenario* s, double alpha, double w,
                                         pg_utility_value_fn value, pg_utility_grad_fn grad,
                                         void* user) {
  if (!s) return fail(PG_ERR_INVALID_ARG, "null scenario");
  if (!value || !grad) return fail(PG_ERR_INVALID_ARG, "external utility needs value and grad");
  ExternalUtility ext;
  ext.value = [value, user](double x, double t) { return value(x, t, user); };
  ext.grad = [grad, user](double x, double t) {
    double dx = 0.0, dt = 0.0;
    grad(x, t, &dx, &dt, user);
    return std::make_pair(dx, dt);
  };
  AgentSpec spec;
  spec.alpha = alpha;
  spec.w = w;
  spec.utility = UtilitySpec::make_external(std::move(ext));
  s->file.scenario.agents.push_back(std::move(spec));
  s->validated.reset();
  return PG_OK;
}

pg_status pg_scenario_parse_json(const char* text, pg_scenario** out) {
  if (!text || !out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto* s = new pg_scenario();
    try {
      s->file = parse_scenario_file(text);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
  });
}

pg_status pg_scenario_load_file(const char* path, pg_scenario** out) {
  if (!path || !out) return fail(PG_ERR_INVALID_ARG, "null argument");
  std::ifstream is(path, std::ios::binary);
  if (!is) return fail(PG_ERR_IO, "cannot open scenario file");
  std::ostringstream buf;
  buf << is.rdbuf();
  return pg_scenario_parse_json(buf.str().c_str(), out);
}

pg_status pg_scenario_to_json(const pg_scenario* s, char** json_out) {
  if (!s || !json_out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *json_out = copy_string(serialize_scenario_file(s->file)); });
}

pg_status pg_scenario_validate(const pg_scenario* s) {
  if (!s) return fail(PG_ERR_INVALID_ARG, "null scenario");
  return guarded([&] { ensure_validated(s); });
}

size_t pg_scenario_agent_count(const pg_scenario* s) {
  return s ? s->file.scenario.agents.size() : 0;
}

pg_status pg_scenario_upsilon_bound(const pg_scenario* s, double* out) {
  if (!s || !out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = upsilon_bound(ensure_validated(s)); });
}

void pg_scenario_free(pg_scenario* s) { delete s; }

void pg_run_options_init(pg_run_options* opts) {
  if (!opts) return;
  opts->max_iters = 100000;
  opts->window = 500;
  opts->eps_feasible = -1.0;
  opts->eps_coherence = -1.0;
  opts->eps_stall = 1e-6;
  opts->mu_step_scale = 1.0;
  opts->mu0 = nullptr;
  opts->mu0_len = 0;
  opts->lambda_bound = -1.0;
}

pg_status pg_scenario_run_options(const pg_scenario* s, pg_run_options* opts) {
  if (!s || !opts) return fail(PG_ERR_INVALID_ARG, "null argument");
  pg_run_options_init(opts);
  const ScenarioFile& f = s->file;
  if (f.max_iters) opts->max_iters = *f.max_iters;
  if (f.window) opts->window = *f.window;
  if (f.eps_feasible) {
    opts->eps_feasible = *f.eps_feasible;
    opts->eps_coherence = *f.eps_feasible;
  }
  if (f.eps_stall) opts->eps_stall = *f.eps_stall;
  if (f.lambda_cap) opts->lambda_bound = *f.lambda_cap;
  if (f.mu0) {
    opts->mu0 = f.mu0->data();  // borrowed from the scenario handle
    opts->mu0_len = f.mu0->size();
  }
  return PG_OK;
}

pg_status pg_run_execute(const pg_scenario* s, const pg_run_options* opts, pg_run** out) {
  if (!s || !out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const ValidatedScenario& vs = ensure_validated(s);
    auto* r = new pg_run();
    try {
      r->output = run(vs, to_core_options(s, opts));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

double pg_run_x_star(const pg_run* r) { return r->output.result.x_star; }
double pg_run_g_min(const pg_run* r) { return r->output.result.g_min; }
int64_t pg_run_k_min(const pg_run* r) { return r->output.result.k_min; }
int64_t pg_run_iterations(const pg_run* r) { return r->output.result.iterations; }

pg_termination pg_run_termination(const pg_run* r) {
  switch (r->output.result.termination) {
    case TerminationReason::ResidualsMet: return PG_TERM_RESIDUALS_MET;
    case TerminationReason::Stalled: return PG_TERM_STALLED;
    case TerminationReason::MaxIters: return PG_TERM_MAX_ITERS;
  }
  return PG_TERM_MAX_ITERS;
}

size_t pg_run_agent_count(const pg_run* r) { return r->output.result.x_i.size(); }

void pg_run_residuals(const pg_run* r, double* payability, double* coherence) {
  if (payability) *payability = r->output.result.payability_residual;
  if (coherence) *coherence = r->output.result.coherence_residual;
}

pg_status pg_run_x_i(const pg_run* r, double* out, size_t len) {
  return copy_vector(r->output.result.x_i, out, len);
}
pg_status pg_run_t(const pg_run* r, double* out, size_t len) {
  return copy_vector(r->output.result.t, out, len);
}
pg_status pg_run_lambda(const pg_run* r, double* out, size_t len) {
  return copy_vector(r->output.result.duals.lambda, out, len);
}
pg_status pg_run_mu(const pg_run* r, double* out, size_t len) {
  return copy_vector(r->output.result.duals.mu, out, len);
}
pg_status pg_run_charges(const pg_run* r, double* out, size_t len) {
  return copy_vector(r->output.result.charges, out, len);
}

size_t pg_run_trace_size(const pg_run* r) { return r->output.trace.size(); }

pg_status pg_run_trace_row(const pg_run* r, size_t idx, pg_trace_row* out) {
  if (!out) return fail(PG_ERR_INVALID_ARG, "null output row");
  if (idx >= r->output.trace.size()) return fail(PG_ERR_INDEX, "trace row out of range");
  const IterationRecord& rec = r->output.trace[idx];
  out->k = rec.k;
  out->g = rec.g;
  out->g_min = rec.g_min;
  out->s_norm_sq = rec.s_norm_sq;
  out->r_norm_sq = rec.r_norm_sq;
  out->payability_gap = rec.payability_gap;
  out->coherence_gap = rec.coherence_gap;
  out->zeta = rec.zeta;
  return PG_OK;
}

pg_status pg_run_write_trace_csv(const pg_run* r, const char* path) {
  if (!r || !path) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] { write_trace_csv_file(path, r->output.trace); });
}

pg_status pg_run_report_json(const pg_run* r, char** json_out) {
  if (!r || !json_out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *json_out = copy_string(run_report_json(r->output.result)); });
}

void pg_run_free(pg_run* r) { delete r; }

pg_status pg_oracle_solve(const pg_scenario* s, double tol, pg_oracle** out) {
  if (!s || !out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const ValidatedScenario& vs = ensure_validated(s);
    auto* o = new pg_oracle();
    try {
      o->result = centralized_solve(vs, tol);
    } catch (...) {
      delete o;
      throw;
    }
    *out = o;
  });
}

double pg_oracle_x(const pg_oracle* o) { return o->result.x_opt; }
double pg_oracle_value(const pg_oracle* o) { return o->result.value; }
double pg_oracle_inner_multiplier(const pg_oracle* o) { return o->result.inner_multiplier; }

pg_status pg_oracle_t(const pg_oracle* o, double* out, size_t len) {
  return copy_vector(o->result.t_opt, out, len);
}

void pg_oracle_free(pg_oracle* o) { delete o; }

pg_status pg_brute_grid_check(const pg_scenario* s, int n, double* out) {
  if (!s || !out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = brute_grid_check(ensure_validated(s), n); });
}

pg_status pg_diagnostics_json(const pg_scenario* s, const pg_run* r, const pg_oracle* o,
                              const pg_run_options* opts, char** json_out) {
  if (!s || !r || !o || !json_out) return fail(PG_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const ValidatedScenario& vs = ensure_validated(s);
    GapBoundConfig cfg;
    if (opts && opts->lambda_bound > 0.0) {
      cfg.lambda_bound = opts->lambda_bound;
      cfg.upsilon = upsilon_bound(vs);
      cfg.lambda_estimated = false;
    } else {
      cfg = estimate_gap_bound_config(vs, to_core_options(s, opts));
    }
    const DiagnosticsReport diag = diagnostics(vs, r->output, o->result, cfg);
    *json_out = copy_string(compare_report_json(r->output.result, o->result, diag));
  });
}

}  // extern "C"
