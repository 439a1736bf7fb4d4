#include "pubgood/agent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pubgood {

AgentContext agent_context(const ValidatedScenario& s, std::size_t idx0) {
  if (idx0 >= s.agent_count())
    throw Error(ErrorCode::Index, "agent_context: agent index out of range");
  AgentContext ctx;
  ctx.index = idx0 + 1;
  ctx.spec = s.agent(idx0);
  ctx.t_max = s.t_max(idx0);
  ctx.L = s.cap();
  ctx.m = s.agent_count();
  return ctx;
}

namespace {

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void check_duals(const AgentContext& ctx, std::span<const double> lambda,
                 std::span<const double> mu) {
  if (lambda.size() != ctx.m)
    throw Error(ErrorCode::Length, "solve_agent: lambda has wrong length");
  if (mu.size() != ctx.m * (ctx.m - 1) / 2)
    throw Error(ErrorCode::Length, "solve_agent: mu has wrong length");
  for (double l : lambda)
    if (l < 0.0) throw Error(ErrorCode::InvalidArgument, "solve_agent: lambda must be >= 0");
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Maximizer of a strictly concave function on [lo, hi], located by bisecting
// the sign change of its derivative. Bracket tolerance 1e-12.
double maximize_concave_1d(double lo, double hi,
                           const std::function<double(double)>& deriv) {
  if (deriv(lo) <= 0.0) return lo;
  if (deriv(hi) >= 0.0) return hi;
  int guard = 0;
  while (hi - lo > 1e-12 && ++guard < 200) {
    const double mid = 0.5 * (lo + hi);
    if (deriv(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// x-part: alpha * U^x(x) + kappa * x on [0, L], closed form.
double solve_x_closed(const AgentContext& ctx, double kappa) {
  const UtilitySpec& u = ctx.spec.utility;
  const double A = ctx.spec.alpha;
  switch (u.kind) {
    case UtilityKind::LogLog:
      // derivative A*a/(1+x) + kappa; positive everywhere when kappa >= 0
      if (kappa >= 0.0) return ctx.L;
      return clamp(A * u.a / -kappa - 1.0, 0.0, ctx.L);
    case UtilityKind::QuadLog:
      return clamp((A * u.a + kappa) / (A * u.p), 0.0, ctx.L);
    default:
      throw Error(ErrorCode::InvalidArgument, "solve_x_closed: no closed form for this kind");
  }
}

// t-part: alpha * U^t(t) + lam_total * t on [-t_max, w], closed form. Both
// built-ins share U^t(t) = b*ln(c-t). With lam_total == 0 the objective is
// strictly decreasing, so the floor is the maximizer.
double solve_t_closed(const AgentContext& ctx, double lam_total) {
  const UtilitySpec& u = ctx.spec.utility;
  if (lam_total <= 0.0) return -ctx.t_max;
  return clamp(u.c - ctx.spec.alpha * u.b / lam_total, -ctx.t_max, ctx.spec.w);
}

double objective_dx(const AgentContext& ctx, double x, double t, double kappa) {
  return ctx.spec.alpha * utility_grad(ctx.spec.utility, x, t).first + kappa;
}

double objective_dt(const AgentContext& ctx, double x, double t, double lam_total) {
  return ctx.spec.alpha * utility_grad(ctx.spec.utility, x, t).second + lam_total;
}

}  // namespace

double agent_objective(const AgentContext& ctx, std::span<const double> lambda,
                       std::span<const double> mu, double x, double t) {
  check_duals(ctx, lambda, mu);
  const double c_i = mu_coefficient(ctx.index, mu, ctx.m);
  return ctx.spec.alpha * utility_eval(ctx.spec.utility, x, t) + t * sum(lambda) -
         x * lambda[ctx.index - 1] + x * c_i;
}

AgentResponse solve_agent(const AgentContext& ctx, std::span<const double> lambda,
                          std::span<const double> mu, SolveMethod method) {
  check_duals(ctx, lambda, mu);
  const double lam_total = sum(lambda);
  const double kappa = mu_coefficient(ctx.index, mu, ctx.m) - lambda[ctx.index - 1];
  const bool builtin = ctx.spec.utility.kind != UtilityKind::External;

  if (method == SolveMethod::Auto)
    method = builtin ? SolveMethod::ClosedForm : SolveMethod::CoordinateAscent;

  double x = 0.0, t = 0.0;
  switch (method) {
    case SolveMethod::ClosedForm:
      x = solve_x_closed(ctx, kappa);
      t = solve_t_closed(ctx, lam_total);
      break;
    case SolveMethod::Bisection:
      // Built-ins are separable, so each coordinate is a self-contained
      // 1-D concave problem; the other coordinate is held at any in-domain
      // value while differentiating.
      if (!builtin)
        throw Error(ErrorCode::InvalidArgument,
                    "solve_agent: bisection route requires a built-in utility");
      x = maximize_concave_1d(0.0, ctx.L,
                              [&](double v) { return objective_dx(ctx, v, 0.0, kappa); });
      t = maximize_concave_1d(-ctx.t_max, ctx.spec.w,
                              [&](double v) { return objective_dt(ctx, 0.0, v, lam_total); });
      break;
    case SolveMethod::CoordinateAscent: {
      x = 0.5 * ctx.L;
      t = 0.5 * (ctx.spec.w - ctx.t_max);
      bool converged = false;
      for (int it = 0; it < 100000; ++it) {
        const double t_held = t;
        const double x_next = maximize_concave_1d(
            0.0, ctx.L, [&](double v) { return objective_dx(ctx, v, t_held, kappa); });
        const double t_next = maximize_concave_1d(
            -ctx.t_max, ctx.spec.w,
            [&](double v) { return objective_dt(ctx, x_next, v, lam_total); });
        const double move = std::max(std::abs(x_next - x), std::abs(t_next - t));
        x = x_next;
        t = t_next;
        if (move < 1e-10) {
          converged = true;
          break;
        }
      }
      if (!converged)
        throw Error(ErrorCode::Numerical,
                    "solve_agent: coordinate ascent exceeded its iteration cap");
      break;
    }
    case SolveMethod::Auto:
      break;  // unreachable
  }

  AgentResponse resp;
  resp.x_bar = x;
  resp.t_bar = t;
  resp.g = agent_objective(ctx, lambda, mu, x, t);
  return resp;
}

}  // namespace pubgood
