#include "pubgood/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pubgood {

UtilitySpec UtilitySpec::log_log(double a, double b, double c) {
  UtilitySpec u;
  u.kind = UtilityKind::LogLog;
  u.a = a;
  u.b = b;
  u.c = c;
  return u;
}

UtilitySpec UtilitySpec::quad_log(double a, double p, double b, double c) {
  UtilitySpec u;
  u.kind = UtilityKind::QuadLog;
  u.a = a;
  u.p = p;
  u.b = b;
  u.c = c;
  return u;
}

UtilitySpec UtilitySpec::make_external(ExternalUtility eval) {
  UtilitySpec u;
  u.kind = UtilityKind::External;
  u.external = std::move(eval);
  return u;
}

double utility_eval(const UtilitySpec& u, double x, double t) {
  switch (u.kind) {
    case UtilityKind::LogLog:
      if (x <= -1.0)
        throw Error(ErrorCode::Domain, "utility_eval: x <= -1 outside ln(1+x) domain");
      if (t >= u.c)
        throw Error(ErrorCode::Domain, "utility_eval: t >= c outside ln(c-t) domain");
      return u.a * std::log1p(x) + u.b * std::log(u.c - t);
    case UtilityKind::QuadLog:
      if (t >= u.c)
        throw Error(ErrorCode::Domain, "utility_eval: t >= c outside ln(c-t) domain");
      return u.a * x - 0.5 * u.p * x * x + u.b * std::log(u.c - t);
    case UtilityKind::External:
      if (!u.external.value)
        throw Error(ErrorCode::InvalidArgument, "utility_eval: external utility has no evaluator");
      return u.external.value(x, t);
  }
  throw Error(ErrorCode::InvalidArgument, "utility_eval: unknown utility kind");
}

std::pair<double, double> utility_grad(const UtilitySpec& u, double x, double t) {
  switch (u.kind) {
    case UtilityKind::LogLog:
      if (x <= -1.0)
        throw Error(ErrorCode::Domain, "utility_grad: x <= -1 outside ln(1+x) domain");
      if (t >= u.c)
        throw Error(ErrorCode::Domain, "utility_grad: t >= c outside ln(c-t) domain");
      return {u.a / (1.0 + x), -u.b / (u.c - t)};
    case UtilityKind::QuadLog:
      if (t >= u.c)
        throw Error(ErrorCode::Domain, "utility_grad: t >= c outside ln(c-t) domain");
      return {u.a - u.p * x, -u.b / (u.c - t)};
    case UtilityKind::External:
      if (!u.external.grad)
        throw Error(ErrorCode::InvalidArgument, "utility_grad: external utility has no gradient");
      return u.external.grad(x, t);
  }
  throw Error(ErrorCode::InvalidArgument, "utility_grad: unknown utility kind");
}

double stepsize(const StepsizeSchedule& sched, std::int64_t k) {
  if (k < 0)
    throw Error(ErrorCode::InvalidArgument, "stepsize: iteration index must be >= 0");
  return sched.r / static_cast<double>(k + 1);
}

std::size_t mu_index(std::size_t i, std::size_t j, std::size_t m) {
  if (j < 1 || i <= j || i > m) {
    std::ostringstream os;
    os << "mu_index: need 1 <= j < i <= m, got i=" << i << " j=" << j << " m=" << m;
    throw Error(ErrorCode::Index, os.str());
  }
  return (i - 1) * (i - 2) / 2 + (j - 1);
}

double mu_coefficient(std::size_t i, std::span<const double> mu, std::size_t m) {
  if (i < 1 || i > m)
    throw Error(ErrorCode::Index, "mu_coefficient: agent id out of range");
  if (mu.size() != m * (m - 1) / 2)
    throw Error(ErrorCode::Length, "mu_coefficient: mu has wrong length");
  double c = 0.0;
  for (std::size_t j = 1; j < i; ++j) c += mu[mu_index(i, j, m)];
  for (std::size_t j = i + 1; j <= m; ++j) c -= mu[mu_index(j, i, m)];
  return c;
}

namespace {

void append_violation(std::vector<std::string>& out, std::size_t agent_1based,
                      const std::string& what) {
  std::ostringstream os;
  os << "agent " << agent_1based << ": " << what;
  out.push_back(os.str());
}

// Monotonicity and strict joint concavity, sampled on the validation grid.
// Gradients are analytic (or caller-supplied); second derivatives come from
// central finite differences, which keeps the check uniform across kinds.
void check_shape_on_grid(const UtilitySpec& u, double L, double t_lo, double t_hi,
                         std::size_t agent_1based, std::vector<std::string>& out) {
  const int n = kValidationGridPoints - 1;
  const double hx = std::max(L / 200.0, 1e-7);
  const double ht = std::max((t_hi - t_lo) / 200.0, 1e-7);
  bool bad_x = false, bad_t = false, bad_concave = false;
  for (int gi = 0; gi <= n && !(bad_x && bad_t && bad_concave); ++gi) {
    const double x = L * gi / n;
    for (int gj = 0; gj <= n; ++gj) {
      const double t = t_lo + (t_hi - t_lo) * gj / n;
      const auto [ux, ut] = utility_grad(u, x, t);
      if (!(ux > 0.0)) bad_x = true;
      if (!(ut < 0.0)) bad_t = true;
      // Hessian at interior points only, so the FD stencil stays in-domain.
      if (gi == 0 || gi == n || gj == 0 || gj == n) continue;
      const double u00 = utility_eval(u, x, t);
      const double uxx =
          (utility_eval(u, x + hx, t) - 2.0 * u00 + utility_eval(u, x - hx, t)) / (hx * hx);
      const double utt =
          (utility_eval(u, x, t + ht) - 2.0 * u00 + utility_eval(u, x, t - ht)) / (ht * ht);
      const double uxt = (utility_eval(u, x + hx, t + ht) - utility_eval(u, x + hx, t - ht) -
                          utility_eval(u, x - hx, t + ht) + utility_eval(u, x - hx, t - ht)) /
                         (4.0 * hx * ht);
      if (!(uxx < 0.0 && utt < 0.0 && uxx * utt - uxt * uxt > 0.0)) bad_concave = true;
    }
  }
  if (bad_x) append_violation(out, agent_1based, "NotIncreasingInX (dU/dx <= 0 at a grid point)");
  if (bad_t) append_violation(out, agent_1based, "NotDecreasingInT (dU/dt >= 0 at a grid point)");
  if (bad_concave)
    append_violation(out, agent_1based, "NonConcaveUtility (sampled Hessian not negative definite)");
}

}  // namespace

ValidatedScenario validate_scenario(const Scenario& s) {
  std::vector<std::string> violations;
  const std::size_t m = s.agents.size();
  if (m < 1) violations.emplace_back("scenario: needs at least one agent");
  if (!(s.L > 0.0)) violations.emplace_back("scenario: BadParameter (L must be > 0)");
  if (!(s.stepsize.r > 0.0)) violations.emplace_back("scenario: BadParameter (stepsize r must be > 0)");

  double total_w = 0.0;
  for (const auto& ag : s.agents) total_w += ag.w;

  std::vector<double> t_max(m, 0.0);
  for (std::size_t idx = 0; idx < m; ++idx) {
    const std::size_t id = idx + 1;
    const AgentSpec& ag = s.agents[idx];
    t_max[idx] = total_w - ag.w;

    if (!(ag.alpha > 0.0)) append_violation(violations, id, "BadParameter (alpha must be > 0)");
    if (!(ag.w > 0.0)) append_violation(violations, id, "BadParameter (w must be > 0)");

    bool params_ok = true;
    switch (ag.utility.kind) {
      case UtilityKind::LogLog:
        if (!(ag.utility.a > 0.0)) { append_violation(violations, id, "BadParameter (a must be > 0)"); params_ok = false; }
        if (!(ag.utility.b > 0.0)) { append_violation(violations, id, "BadParameter (b must be > 0)"); params_ok = false; }
        if (!(ag.utility.c > ag.w)) { append_violation(violations, id, "BadParameter (c must exceed w)"); params_ok = false; }
        break;
      case UtilityKind::QuadLog:
        if (!(ag.utility.a > 0.0)) { append_violation(violations, id, "BadParameter (a must be > 0)"); params_ok = false; }
        if (!(ag.utility.p > 0.0)) { append_violation(violations, id, "BadParameter (p must be > 0)"); params_ok = false; }
        if (!(ag.utility.b > 0.0)) { append_violation(violations, id, "BadParameter (b must be > 0)"); params_ok = false; }
        if (!(ag.utility.c > ag.w)) { append_violation(violations, id, "BadParameter (c must exceed w)"); params_ok = false; }
        if (params_ok && s.L > 0.0 && !(ag.utility.a - ag.utility.p * s.L > 0.0)) {
          append_violation(violations, id, "NotIncreasingInX (a - p*L <= 0)");
          params_ok = false;
        }
        break;
      case UtilityKind::External:
        if (!ag.utility.external.value || !ag.utility.external.grad) {
          append_violation(violations, id, "BadParameter (external utility needs value and grad)");
          params_ok = false;
        }
        break;
    }

    if (params_ok && ag.w > 0.0 && s.L > 0.0) {
      check_shape_on_grid(ag.utility, s.L, -t_max[idx], ag.w, id, violations);
      // (x, t) = (0, 0) is always feasible; it must evaluate finitely.
      try {
        if (!std::isfinite(utility_eval(ag.utility, 0.0, 0.0)))
          append_violation(violations, id, "utility not finite at (0, 0)");
      } catch (const Error& e) {
        append_violation(violations, id, std::string("utility undefined at (0, 0): ") + e.what());
      }
    }
  }

  if (!violations.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) os << "; ";
      os << violations[i];
    }
    throw Error(ErrorCode::Validation, os.str());
  }
  return ValidatedScenario(s, std::move(t_max), total_w);
}

double upsilon_bound(const ValidatedScenario& s) {
  const double m = static_cast<double>(s.agent_count());
  double mx = s.cap();
  for (std::size_t i = 0; i < s.agent_count(); ++i) mx = std::max(mx, s.agent(i).w);
  return (4.0 * m + m * (m + 1.0) * (m + 1.0)) * mx * mx;
}

}  // namespace pubgood
