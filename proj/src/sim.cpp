#include "pubgood/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pubgood/agent.hpp"

namespace pubgood {

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::ResidualsMet: return "residuals-met";
    case TerminationReason::Stalled: return "stalled";
    case TerminationReason::MaxIters: return "max-iters";
  }
  return "unknown";
}

namespace {

struct Residuals {
  double payability = 0.0;
  double coherence = 0.0;
};

Residuals residuals_of(std::span<const AgentResponse> responses) {
  double t_total = 0.0;
  for (const auto& r : responses) t_total += r.t_bar;
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double pay = 0.0;
  for (const auto& r : responses) {
    pay = std::max(pay, r.x_bar - t_total);
    x_lo = std::min(x_lo, r.x_bar);
    x_hi = std::max(x_hi, r.x_bar);
  }
  Residuals out;
  out.payability = std::max(pay, 0.0);
  out.coherence = responses.size() > 1 ? x_hi - x_lo : 0.0;
  return out;
}

IterationRecord make_record(std::int64_t k, double g, double g_min,
                            std::span<const AgentResponse> responses, double zeta) {
  IterationRecord rec;
  rec.k = k;
  rec.g = g;
  rec.g_min = g_min;
  double t_total = 0.0;
  for (const auto& r : responses) t_total += r.t_bar;
  for (const auto& r : responses) {
    const double s_i = t_total - r.x_bar;
    rec.s_norm_sq += s_i * s_i;
  }
  const std::size_t m = responses.size();
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double r_ij = responses[i].x_bar - responses[j].x_bar;
      rec.r_norm_sq += r_ij * r_ij;
    }
  const Residuals res = residuals_of(responses);
  rec.payability_gap = res.payability;
  rec.coherence_gap = res.coherence;
  rec.zeta = zeta;
  return rec;
}

double resolve_eps(const std::optional<double>& eps, double L) {
  return eps ? *eps : 1e-2 * std::max(1.0, L);
}

}  // namespace

bool check_termination(std::span<const IterationRecord> trace, const IterationRecord& best,
                       const TerminationCriteria& term, double L) {
  if (trace.size() < static_cast<std::size_t>(term.window)) return false;
  const double eps_f = resolve_eps(term.eps_feasible, L);
  const double eps_c = resolve_eps(term.eps_coherence, L);
  if (!(best.payability_gap <= eps_f && best.coherence_gap <= eps_c)) return false;
  const IterationRecord& old = trace[trace.size() - static_cast<std::size_t>(term.window)];
  return old.g_min - trace.back().g_min < term.eps_stall;
}

RunOutput run(const ValidatedScenario& s, const RunOptions& opts) {
  if (opts.max_iters < 1)
    throw Error(ErrorCode::InvalidArgument, "run: max_iters must be >= 1");
  const std::size_t m = s.agent_count();

  std::vector<AgentContext> contexts;
  contexts.reserve(m);
  for (std::size_t i = 0; i < m; ++i) contexts.push_back(agent_context(s, i));

  DualState state = init_duals(m, opts.mu0);
  BestTracker tracker;
  Trace trace;
  std::int64_t expected = std::min(opts.max_iters, kTraceDecimationStart);
  if (opts.max_iters > kTraceDecimationStart)
    expected += (opts.max_iters - kTraceDecimationStart) / 10 + 1;
  trace.reserve(static_cast<std::size_t>(expected));
  std::vector<AgentResponse> responses(m);

  TerminationReason reason = TerminationReason::MaxIters;
  std::int64_t iterations = 0;
  for (std::int64_t k = 0; k < opts.max_iters; ++k) {
    const double zeta = stepsize(s.stepsize_schedule(), k);

    // Announcement fan-out / response fan-in. Each solve is a pure function
    // of (context, duals); the loop is the synchronization barrier.
    for (std::size_t i = 0; i < m; ++i)
      responses[i] = solve_agent(contexts[i], state.lambda, state.mu);

    const double g = aggregate_dual_value(responses);
    update_best(tracker, g, k, state, responses);

    if (k < kTraceDecimationStart || k % 10 == 0)
      trace.push_back(make_record(k, g, tracker.g_min, responses, zeta));

    iterations = k + 1;
    const Residuals best_res = residuals_of(tracker.responses_min);
    IterationRecord best_rec;
    best_rec.payability_gap = best_res.payability;
    best_rec.coherence_gap = best_res.coherence;
    if (check_termination(trace, best_rec, opts.term, s.cap())) {
      reason = TerminationReason::ResidualsMet;
      break;
    }

    update_lambda(state.lambda, responses, zeta);
    update_mu(state.mu, responses, zeta * opts.mu_step_scale);
  }

  // Settlement from the best iterate.
  RunOutput out;
  out.trace = std::move(trace);
  RunResult& res = out.result;
  res.g_min = tracker.g_min;
  res.k_min = tracker.k_min;
  res.iterations = iterations;
  res.duals = tracker.state_min;
  res.x_i.resize(m);
  res.t.resize(m);
  res.g_i.resize(m);
  double x_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    res.x_i[i] = tracker.responses_min[i].x_bar;
    res.t[i] = tracker.responses_min[i].t_bar;
    res.g_i[i] = tracker.responses_min[i].g;
    x_sum += res.x_i[i];
  }
  res.x_star = x_sum / static_cast<double>(m);
  res.charges = compute_charges(res.duals, res.x_i, res.t);
  const Residuals best_res = residuals_of(tracker.responses_min);
  res.payability_residual = best_res.payability;
  res.coherence_residual = best_res.coherence;

  if (reason == TerminationReason::MaxIters) {
    const double eps_f = resolve_eps(opts.term.eps_feasible, s.cap());
    const double eps_c = resolve_eps(opts.term.eps_coherence, s.cap());
    if (best_res.payability <= eps_f && best_res.coherence <= eps_c)
      reason = TerminationReason::Stalled;
  }
  res.termination = reason;
  return out;
}

double gap_bound(std::int64_t k, const GapBoundConfig& cfg, const StepsizeSchedule& sched) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "gap_bound: k must be >= 0");
  double zeta_sum = 0.0, zeta_sq_sum = 0.0;
  for (std::int64_t i = 0; i <= k; ++i) {
    const double z = sched.r / static_cast<double>(i + 1);
    zeta_sum += z;
    zeta_sq_sum += z * z;
  }
  return (cfg.lambda_bound + cfg.upsilon * zeta_sq_sum) / (2.0 * zeta_sum);
}

GapBoundConfig estimate_gap_bound_config(const ValidatedScenario& s, const RunOptions& opts) {
  RunOptions ref = opts;
  ref.max_iters = opts.max_iters * 10;
  // The reference run must cover its whole budget; disable the stop test.
  ref.term.eps_stall = 0.0;
  const RunOutput ref_out = run(s, ref);

  const DualState start = init_duals(s.agent_count(), opts.mu0);
  double d2 = 0.0;
  for (std::size_t i = 0; i < start.lambda.size(); ++i) {
    const double d = start.lambda[i] - ref_out.result.duals.lambda[i];
    d2 += d * d;
  }
  for (std::size_t i = 0; i < start.mu.size(); ++i) {
    const double d = start.mu[i] - ref_out.result.duals.mu[i];
    d2 += d * d;
  }
  GapBoundConfig cfg;
  cfg.lambda_bound = std::max(2.0 * d2, 1e-12);
  cfg.upsilon = upsilon_bound(s);
  cfg.lambda_estimated = true;
  return cfg;
}

DiagnosticsReport diagnostics(const ValidatedScenario& s, const RunOutput& out,
                              const OracleResult& oracle, const GapBoundConfig& cfg) {
  DiagnosticsReport rep;
  rep.oracle_value = oracle.value;
  rep.duality_gap = out.result.g_min - oracle.value;
  rep.relative_gap = std::abs(rep.duality_gap) / (1.0 + std::abs(oracle.value));
  rep.upsilon = cfg.upsilon;
  rep.lambda_bound = cfg.lambda_bound;
  rep.lambda_estimated = cfg.lambda_estimated;
  rep.payability_residual = out.result.payability_residual;
  rep.coherence_residual = out.result.coherence_residual;

  rep.weak_duality_min_margin = std::numeric_limits<double>::infinity();
  rep.gmin_monotone = true;
  rep.upsilon_ok = true;
  rep.envelope_ok = true;
  rep.envelope_min_margin = std::numeric_limits<double>::infinity();
  rep.upsilon_max_ratio = 0.0;

  // Single pass over the trace, accumulating the stepsize sums for the
  // envelope incrementally. With decimation active the envelope is still
  // evaluated with the full sums up to each recorded k.
  double zeta_sum = 0.0, zeta_sq_sum = 0.0;
  std::int64_t next_k = 0;
  double prev_gmin = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : out.trace) {
    for (std::int64_t i = next_k; i <= rec.k; ++i) {
      const double z = s.stepsize_schedule().r / static_cast<double>(i + 1);
      zeta_sum += z;
      zeta_sq_sum += z * z;
    }
    next_k = rec.k + 1;

    rep.weak_duality_min_margin =
        std::min(rep.weak_duality_min_margin, rec.g - oracle.value);
    if (rec.g_min > prev_gmin) rep.gmin_monotone = false;
    prev_gmin = rec.g_min;

    const double norms = rec.s_norm_sq + rec.r_norm_sq;
    if (cfg.upsilon > 0.0)
      rep.upsilon_max_ratio = std::max(rep.upsilon_max_ratio, norms / cfg.upsilon);
    if (norms > cfg.upsilon && rep.upsilon_first_violation_k < 0)
      rep.upsilon_first_violation_k = rec.k;

    const double envelope = (cfg.lambda_bound + cfg.upsilon * zeta_sq_sum) / (2.0 * zeta_sum);
    rep.envelope_min_margin =
        std::min(rep.envelope_min_margin, envelope - (rec.g_min - oracle.value));
  }
  rep.weak_duality_ok = rep.weak_duality_min_margin >= -1e-9;
  rep.upsilon_ok = rep.upsilon_first_violation_k < 0;
  rep.envelope_ok = rep.envelope_min_margin >= 0.0;

  // Settlement checks at the best iterate.
  double lam_total = 0.0;
  for (double l : out.result.duals.lambda) lam_total += l;
  double gamma_sum = 0.0;
  for (double gm : out.result.charges) gamma_sum += gm;
  rep.budget_residual = std::abs(gamma_sum);
  rep.budget_bound =
      lam_total * (out.result.coherence_residual + out.result.payability_residual) + 1e-6;
  for (std::size_t i = 0; i < s.agent_count(); ++i) {
    const AgentSpec& ag = s.agent(i);
    const double u = ag.alpha * utility_eval(ag.utility, out.result.x_i[i], out.result.t[i]);
    rep.charge_identity_max_error =
        std::max(rep.charge_identity_max_error,
                 std::abs(out.result.g_i[i] + out.result.charges[i] - u));
  }
  return rep;
}

}  // namespace pubgood
