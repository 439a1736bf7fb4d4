#include "pubgood/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pubgood {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// t_i(nu): the box-clamped contribution at which agent i's marginal
// disutility of contributing matches the price nu (> 0). Nondecreasing
// in nu. Closed form for the built-in ln(c-t) money term; derivative
// bisection otherwise.
double t_of_nu(const ValidatedScenario& s, std::size_t i, double x, double nu) {
  const AgentSpec& ag = s.agent(i);
  const double lo = -s.t_max(i);
  const double hi = ag.w;
  switch (ag.utility.kind) {
    case UtilityKind::LogLog:
    case UtilityKind::QuadLog:
      // alpha*b/(c-t) = nu  =>  t = c - alpha*b/nu
      return clamp(ag.utility.c - ag.alpha * ag.utility.b / nu, lo, hi);
    case UtilityKind::External: {
      // h(t) = alpha * dU/dt(x, t) is strictly decreasing; solve h(t) = -nu.
      auto h = [&](double t) { return ag.alpha * utility_grad(ag.utility, x, t).second; };
      if (h(lo) <= -nu) return lo;
      if (h(hi) >= -nu) return hi;
      double a = lo, b = hi;
      int guard = 0;
      while (b - a > 1e-13 && ++guard < 200) {
        const double mid = 0.5 * (a + b);
        if (h(mid) > -nu)
          a = mid;
        else
          b = mid;
      }
      return 0.5 * (a + b);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "t_of_nu: unknown utility kind");
}

double t_sum_at(const ValidatedScenario& s, double x, double nu) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.agent_count(); ++i) total += t_of_nu(s, i, x, nu);
  return total;
}

}  // namespace

InnerAllocation inner_allocation(const ValidatedScenario& s, double x) {
  const double x_hi = std::min(s.cap(), s.total_endowment());
  if (x < -1e-12 || x > x_hi + 1e-12)
    throw Error(ErrorCode::InvalidArgument, "inner_allocation: x outside [0, min(L, sum w)]");
  x = clamp(x, 0.0, x_hi);

  // Bracket nu so that sum_i t_i(nu) straddles x, then bisect. The sum is
  // continuous and nondecreasing in nu, reaching sum w_i as nu -> inf and
  // -sum T_max_i <= 0 as nu -> 0+, so a bracket always exists for feasible x.
  double nu_lo = 1.0, nu_hi = 1.0;
  int guard = 0;
  while (t_sum_at(s, x, nu_hi) < x) {
    nu_hi *= 2.0;
    if (++guard > 2000)
      throw Error(ErrorCode::Bracket, "inner_allocation: no nu reaches the budget (bug)");
  }
  guard = 0;
  while (t_sum_at(s, x, nu_lo) > x && nu_lo > 1e-300) {
    nu_lo /= 2.0;
    ++guard;
  }
  guard = 0;
  while (nu_hi - nu_lo > 1e-12 && ++guard < 2000) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    if (t_sum_at(s, x, mid) < x)
      nu_lo = mid;
    else
      nu_hi = mid;
  }

  InnerAllocation out;
  out.nu = 0.5 * (nu_lo + nu_hi);
  out.t.resize(s.agent_count());
  out.value = 0.0;
  for (std::size_t i = 0; i < s.agent_count(); ++i) {
    out.t[i] = t_of_nu(s, i, x, out.nu);
    out.value += s.agent(i).alpha * utility_eval(s.agent(i).utility, x, out.t[i]);
  }
  return out;
}

OracleResult centralized_solve(const ValidatedScenario& s, double tol) {
  if (!(tol > 0.0)) tol = 1e-8;
  double lo = 0.0;
  double hi = std::min(s.cap(), s.total_endowment());
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;

  auto V = [&](double x) { return inner_allocation(s, x).value; };

  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = V(c), fd = V(d);
  while (hi - lo > tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = V(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = V(d);
    }
  }

  OracleResult res;
  res.x_opt = 0.5 * (lo + hi);
  InnerAllocation inner = inner_allocation(s, res.x_opt);
  res.t_opt = std::move(inner.t);
  res.value = inner.value;
  res.inner_multiplier = inner.nu;
  return res;
}

namespace {

bool is_separable(const ValidatedScenario& s) {
  for (std::size_t i = 0; i < s.agent_count(); ++i)
    if (s.agent(i).utility.kind == UtilityKind::External) return false;
  return true;
}

// alpha_i * (public-good part of U_i) at x -- valid for the built-ins only.
double x_part(const AgentSpec& ag, double x) {
  const UtilitySpec& u = ag.utility;
  if (u.kind == UtilityKind::LogLog) return ag.alpha * u.a * std::log1p(x);
  return ag.alpha * (u.a * x - 0.5 * u.p * x * x);
}

double t_part(const AgentSpec& ag, double t) {
  return ag.alpha * ag.utility.b * std::log(ag.utility.c - t);
}

}  // namespace

double brute_grid_check(const ValidatedScenario& s, int n) {
  const std::size_t m = s.agent_count();
  if (m > 3) throw Error(ErrorCode::TooLarge, "brute_grid_check: supports m <= 3 only");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "brute_grid_check: need n >= 1");

  const double L = s.cap();
  const double dx = L / n;
  std::vector<double> t_lo(m), t_step(m);
  for (std::size_t i = 0; i < m; ++i) {
    t_lo[i] = -s.t_max(i);
    t_step[i] = (s.agent(i).w - t_lo[i]) / n;
  }

  double best = -std::numeric_limits<double>::infinity();

  if (is_separable(s)) {
    // The objective splits into an x-sum and per-agent t-terms, so the best
    // feasible x for a contribution tuple depends only on sum t_j. Hoist the
    // per-axis values and a prefix-max over the x grid; every t tuple is
    // still enumerated.
    std::vector<double> prefix_best_x(n + 1);
    double run = -std::numeric_limits<double>::infinity();
    for (int g = 0; g <= n; ++g) {
      const double x = g * dx;
      double f = 0.0;
      for (std::size_t i = 0; i < m; ++i) f += x_part(s.agent(i), x);
      run = std::max(run, f);
      prefix_best_x[g] = run;
    }
    std::vector<std::vector<double>> tv(m, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < m; ++i)
      for (int g = 0; g <= n; ++g) tv[i][g] = t_part(s.agent(i), t_lo[i] + g * t_step[i]);

    auto best_with_budget = [&](double t_total, double g_sum) {
      if (t_total < 0.0) return;  // no x in [0, L] is payable
      int gx = static_cast<int>(std::floor(t_total / dx + 1e-12));
      gx = std::min(gx, n);
      best = std::max(best, g_sum + prefix_best_x[gx]);
    };

    if (m == 1) {
      for (int g0 = 0; g0 <= n; ++g0)
        best_with_budget(t_lo[0] + g0 * t_step[0], tv[0][g0]);
    } else if (m == 2) {
      for (int g0 = 0; g0 <= n; ++g0) {
        const double t0 = t_lo[0] + g0 * t_step[0];
        for (int g1 = 0; g1 <= n; ++g1)
          best_with_budget(t0 + t_lo[1] + g1 * t_step[1], tv[0][g0] + tv[1][g1]);
      }
    } else {
      for (int g0 = 0; g0 <= n; ++g0) {
        const double t0 = t_lo[0] + g0 * t_step[0];
        for (int g1 = 0; g1 <= n; ++g1) {
          const double t01 = t0 + t_lo[1] + g1 * t_step[1];
          const double v01 = tv[0][g0] + tv[1][g1];
          for (int g2 = 0; g2 <= n; ++g2)
            best_with_budget(t01 + t_lo[2] + g2 * t_step[2], v01 + tv[2][g2]);
        }
      }
    }
    return best;
  }

  // General (non-separable) path: full enumeration.
  std::vector<int> g(m, 0);
  std::vector<double> t(m);
  while (true) {
    double t_total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      t[i] = t_lo[i] + g[i] * t_step[i];
      t_total += t[i];
    }
    if (t_total >= 0.0) {
      const int gx_max = std::min(n, static_cast<int>(std::floor(t_total / dx + 1e-12)));
      for (int gx = 0; gx <= gx_max; ++gx) {
        const double x = gx * dx;
        double obj = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          obj += s.agent(i).alpha * utility_eval(s.agent(i).utility, x, t[i]);
        best = std::max(best, obj);
      }
    }
    std::size_t pos = 0;
    while (pos < m && ++g[pos] > n) g[pos++] = 0;
    if (pos == m) break;
  }
  return best;
}

}  // namespace pubgood
