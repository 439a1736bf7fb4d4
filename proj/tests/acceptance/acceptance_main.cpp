// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion; the exit status is the number of failed
// criteria. Expected data (scenario families, budgets, tolerances) is fixed
// here, not calibrated at runtime.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pubgood/agent.hpp"
#include "pubgood/model.hpp"
#include "pubgood/oracle.hpp"
#include "pubgood/scenario_io.hpp"
#include "pubgood/sim.hpp"

#include "../test_util.hpp"

using namespace pubgood;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct ScenarioCase {
  Scenario scenario;
  RunOutput out;
  OracleResult oracle;
  GapBoundConfig cfg;       // estimated from a 10x reference run
  DiagnosticsReport diag;
  double seconds = 0.0;
  // subgradient-ceiling scan including the reference run
  std::int64_t violations = 0;
  std::int64_t violations_after_k0 = 0;
  double max_norm_ratio = 0.0;
  double ref_weak_margin = 0.0;
  bool ref_gmin_monotone = true;
};

void scan_trace(const Trace& trace, double upsilon, double oracle_value, ScenarioCase& c) {
  double prev = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : trace) {
    const double norms = rec.s_norm_sq + rec.r_norm_sq;
    if (norms > upsilon) {
      ++c.violations;
      if (rec.k > 0) ++c.violations_after_k0;
    }
    c.max_norm_ratio = std::max(c.max_norm_ratio, norms / upsilon);
    c.ref_weak_margin = std::min(c.ref_weak_margin, rec.g - oracle_value);
    if (rec.g_min > prev) c.ref_gmin_monotone = false;
    prev = rec.g_min;
  }
}

RunOptions full_budget(std::int64_t iters) {
  RunOptions opts;
  opts.max_iters = iters;
  opts.term.eps_stall = 0.0;  // measure at the full budget
  return opts;
}

ScenarioCase run_case(const Scenario& scenario, std::int64_t iters) {
  ScenarioCase c;
  c.scenario = scenario;
  const ValidatedScenario vs = validate_scenario(scenario);
  const RunOptions opts = full_budget(iters);

  const auto start = std::chrono::steady_clock::now();
  c.out = run(vs, opts);
  c.oracle = centralized_solve(vs);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  // Reference run at 10x the budget fixes the envelope constant.
  const RunOutput ref = run(vs, full_budget(iters * 10));
  double d2 = 0.0;
  const DualState start_duals = init_duals(vs.agent_count());
  for (std::size_t i = 0; i < start_duals.lambda.size(); ++i) {
    const double d = start_duals.lambda[i] - ref.result.duals.lambda[i];
    d2 += d * d;
  }
  for (std::size_t i = 0; i < start_duals.mu.size(); ++i) {
    const double d = start_duals.mu[i] - ref.result.duals.mu[i];
    d2 += d * d;
  }
  c.cfg.lambda_bound = std::max(2.0 * d2, 1e-12);
  c.cfg.upsilon = upsilon_bound(vs);
  c.cfg.lambda_estimated = true;

  c.ref_weak_margin = std::numeric_limits<double>::infinity();
  scan_trace(c.out.trace, c.cfg.upsilon, c.oracle.value, c);
  scan_trace(ref.trace, c.cfg.upsilon, c.oracle.value, c);

  c.diag = diagnostics(vs, c.out, c.oracle, c.cfg);
  return c;
}

// --- criteria ---------------------------------------------------------------

void criterion_1(std::span<const ScenarioCase> cases) {
  bool pass = true;
  double worst_gap = 0.0, worst_coh = 0.0, worst_pay = 0.0, worst_time = 0.0;
  for (const ScenarioCase& c : cases) {
    const double L = c.scenario.L;
    const double rel = c.diag.relative_gap;
    const double coh = c.out.result.coherence_residual / L;
    const double pay = c.out.result.payability_residual / std::max(1.0, L);
    worst_gap = std::max(worst_gap, rel);
    worst_coh = std::max(worst_coh, coh);
    worst_pay = std::max(worst_pay, pay);
    worst_time = std::max(worst_time, c.seconds);
    if (rel > 1e-2 || coh > 5e-2 || pay > 5e-2 || c.seconds > 10.0) pass = false;
  }
  report(1, pass,
         "oracle agreement on 20 scenarios: max relative gap " + fmt(worst_gap) +
             " (<= 0.01), max coherence/L " + fmt(worst_coh) + " (<= 0.05), max payability " +
             fmt(worst_pay) + " (<= 0.05), max runtime " + fmt(worst_time) + " s (<= 10)");
}

void criterion_2(const ScenarioCase& fixture_case) {
  const OracleResult& oracle = fixture_case.oracle;
  const bool oracle_ok = std::abs(oracle.x_opt - 1.0) <= 1e-6 &&
                         std::abs(oracle.t_opt[0] - 1.0) <= 1e-6 &&
                         std::abs(oracle.value - 2.0 * std::log(2.0)) <= 1e-6;

  const double x_err = std::abs(fixture_case.out.result.x_star - 1.0);
  const bool run_ok = x_err <= 2e-2;
  report(2, oracle_ok && run_ok,
         "analytic fixture: oracle x*=" + fmt(oracle.x_opt) + ", value=" + fmt(oracle.value) +
             " (2ln2=" + fmt(2.0 * std::log(2.0)) + "); exchange x* error " + fmt(x_err) +
             " (<= 0.02) after 50000 iterations");
}

void criterion_3(std::span<const ScenarioCase> cases) {
  std::int64_t violations = 0, after_k0 = 0, runs = 0;
  double max_ratio = 0.0;
  for (const ScenarioCase& c : cases) {
    violations += c.violations;
    after_k0 += c.violations_after_k0;
    max_ratio = std::max(max_ratio, c.max_norm_ratio);
    runs += 2;  // the measured run and its reference run
  }
  const bool pass = violations == 0;
  std::ostringstream os;
  os << "subgradient-norm ceiling (4m+m(m+1)^2)*max{L,w}^2 across " << runs << " runs: "
     << violations << " violations (zero permitted), max ||s||^2+||r||^2 over bound = "
     << fmt(max_ratio);
  if (violations > 0)
    os << "; all but " << after_k0 << " occur at k=0 where lambda(0)=0 sends every "
       << "contribution to its floor -T_max_i, so |sum_j t_j| reaches (m-1)*sum_j w_j, "
       << "outside what the bound's derivation (which assumes financing holds at the "
       << "replies) accounts for";
  report(3, pass, os.str());
}

void criterion_4(std::span<const ScenarioCase> cases) {
  bool envelope_ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  for (const ScenarioCase& c : cases) {
    envelope_ok = envelope_ok && c.diag.envelope_ok;
    min_margin = std::min(min_margin, c.diag.envelope_min_margin);
    const StepsizeSchedule sched = c.scenario.stepsize;
    const double ratio = gap_bound(100000, c.cfg, sched) / gap_bound(100, c.cfg, sched);
    worst_ratio = std::max(worst_ratio, ratio);
  }
  const bool decay_ok = worst_ratio < 0.10;
  std::ostringstream os;
  os << "gap envelope with estimated Lambda: respected at every recorded k on all runs = "
     << (envelope_ok ? "yes" : "NO") << " (min margin " << fmt(min_margin)
     << "); envelope(1e5)/envelope(1e2) = " << fmt(worst_ratio) << " (< 0.10 required)";
  if (!decay_ok)
    os << " -- with zeta_k = r/(k+1) the envelope scales as 1/sum zeta ~ 1/ln k, so the "
       << "ratio is pinned near ln(1e2)/ln(1e5) ~ 0.43 for every Lambda, Upsilon, r";
  report(4, envelope_ok && decay_ok, os.str());
}

void criterion_5(std::span<const ScenarioCase> cases) {
  bool pass = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const ScenarioCase& c : cases) {
    if (!c.diag.weak_duality_ok || !c.diag.gmin_monotone || !c.ref_gmin_monotone) pass = false;
    min_margin = std::min({min_margin, c.diag.weak_duality_min_margin, c.ref_weak_margin});
    if (c.ref_weak_margin < -1e-9) pass = false;
  }
  report(5, pass,
         "weak duality g(k) >= oracle value - 1e-9 and non-increasing g_min on all runs; "
         "min margin " + fmt(min_margin));
}

void criterion_6(std::span<const ScenarioCase> cases) {
  bool pass = true;
  double worst_budget = 0.0, worst_identity = 0.0;
  for (const ScenarioCase& c : cases) {
    if (c.diag.budget_residual > c.diag.budget_bound) pass = false;
    if (c.diag.charge_identity_max_error > 1e-9) pass = false;
    worst_budget = std::max(worst_budget, c.diag.budget_residual);
    worst_identity = std::max(worst_identity, c.diag.charge_identity_max_error);
  }
  report(6, pass,
         "settlement: max |sum gamma| " + fmt(worst_budget) +
             " within (sum lambda)*(residuals)+1e-6 on every converged run; max charge "
             "identity error " + fmt(worst_identity) + " (<= 1e-9)");
}

void criterion_7() {
  testutil::Rng rng(0xac7e5eed);
  double worst = 0.0;
  for (int family = 0; family < 2; ++family) {
    for (int draw = 0; draw < 1000; ++draw) {
      Scenario s;
      s.L = rng.uniform(1.0, 3.0);
      s.stepsize.r = 1.0;
      for (int i = 0; i < 3; ++i) {
        AgentSpec ag;
        ag.alpha = rng.uniform(0.5, 2.0);
        ag.w = rng.uniform(0.5, 2.0);
        if (family == 0) {
          ag.utility = UtilitySpec::log_log(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                                            ag.w + rng.uniform(1.0, 3.0));
        } else {
          const double p = rng.uniform(0.1, 0.5);
          ag.utility = UtilitySpec::quad_log(p * s.L + rng.uniform(0.5, 2.0), p,
                                             rng.uniform(0.5, 2.0),
                                             ag.w + rng.uniform(1.0, 3.0));
        }
        s.agents.push_back(ag);
      }
      const ValidatedScenario vs = validate_scenario(s);
      std::vector<double> lambda(3), mu(3);
      for (auto& l : lambda) l = rng.uniform(0.0, 3.0);
      for (auto& v : mu) v = rng.uniform(-2.0, 2.0);
      const AgentContext ctx = agent_context(vs, static_cast<std::size_t>(draw % 3));
      const AgentResponse a = solve_agent(ctx, lambda, mu, SolveMethod::ClosedForm);
      const AgentResponse b = solve_agent(ctx, lambda, mu, SolveMethod::Bisection);
      const AgentResponse c = solve_agent(ctx, lambda, mu, SolveMethod::CoordinateAscent);
      worst = std::max({worst, std::abs(a.x_bar - b.x_bar), std::abs(a.t_bar - b.t_bar),
                        std::abs(a.g - b.g), std::abs(a.x_bar - c.x_bar),
                        std::abs(a.t_bar - c.t_bar), std::abs(a.g - c.g)});
    }
  }
  report(7, worst <= 1e-8,
         "closed-form vs bisection vs coordinate-ascent subproblem routes on 1000 draws "
         "per family: max disagreement " + fmt(worst) + " (<= 1e-8)");
}

void criterion_8() {
  testutil::Rng rng(0x0bac1e);
  bool pass = true;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + trial % 3;
    const Scenario s = testutil::random_log_scenario(rng, m);
    const ValidatedScenario vs = validate_scenario(s);
    const int n = 400;
    const OracleResult res = centralized_solve(vs);
    const double grid = brute_grid_check(vs, n);

    // One grid cell's objective variation: per-axis Lipschitz constant times
    // spacing (the optimum snaps to a neighboring feasible grid point).
    double tol = 0.0;
    double lip_x = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const AgentSpec& ag = s.agents[i];
      lip_x += ag.alpha * ag.utility.a;  // d/dx at x = 0
      const double lip_t = ag.alpha * ag.utility.b / (ag.utility.c - ag.w);
      tol += lip_t * (ag.w + vs.t_max(i)) / n;
    }
    tol += lip_x * s.L / n;

    const double gap = res.value - grid;
    worst_gap = std::max(worst_gap, std::abs(gap));
    if (gap < -1e-9 || gap > tol) pass = false;
  }
  report(8, pass,
         "centralized oracle vs exhaustive n=400 grid on 10 scenarios (m <= 3): max |gap| " +
             fmt(worst_gap) + ", within one cell's objective variation");
}

void criterion_9() {
  namespace fs = std::filesystem;
  std::string cli;
  if (const char* env = std::getenv("PUBGOOD_CLI")) cli = env;
  if (cli.empty()) {
    // fall back to the binary built next to this suite
    std::error_code ec;
    const fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
      const fs::path sibling = self.parent_path().parent_path() / "pubgood_cli";
      if (fs::exists(sibling)) cli = sibling.string();
    }
  }
  if (cli.empty()) {
    report(9, false, "determinism: PUBGOOD_CLI not set and no CLI binary found");
    return;
  }

  const fs::path dir = fs::temp_directory_path() / "pubgood_acceptance";
  fs::create_directories(dir);
  const fs::path scenario_path = dir / "fixture.json";
  {
    ScenarioFile file;
    file.scenario = testutil::single_log_scenario();
    file.max_iters = 5000;
    std::ofstream os(scenario_path);
    os << serialize_scenario_file(file);
  }

  auto run_once = [&](const fs::path& trace) {
    std::ostringstream cmd;
    cmd << '"' << cli << '"' << " run " << scenario_path << " --trace " << trace
        << " --report " << (dir / "report.json") << " >/dev/null 2>&1";
    return std::system(cmd.str().c_str());
  };

  const fs::path trace_a = dir / "a.csv";
  const fs::path trace_b = dir / "b.csv";
  const int rc_a = run_once(trace_a);
  const int rc_b = run_once(trace_b);

  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(trace_a);
  const std::string b = slurp(trace_b);

  const bool pass = rc_a == 0 && rc_b == 0 && !a.empty() && a == b;
  report(9, pass,
         "repeated cmd_run invocations: exit codes (" + std::to_string(rc_a) + ", " +
             std::to_string(rc_b) + "), trace bytes " + std::to_string(a.size()) +
             (a == b ? " identical" : " DIFFER"));
  fs::remove_all(dir);
}

}  // namespace

// 20 randomized scenarios (m cycling 2..6) plus the analytic fixture last;
// every entry also carries its 10x reference run's scan results.
std::vector<ScenarioCase> build_cases() {
  testutil::Rng rng(0x5eedbea7);
  std::vector<ScenarioCase> cases;
  cases.reserve(21);
  for (int i = 0; i < 20; ++i) {
    const std::size_t m = 2 + i % 5;
    cases.push_back(run_case(testutil::random_log_scenario(rng, m), 20000));
  }
  cases.push_back(run_case(testutil::single_log_scenario(), 50000));
  return cases;
}

int main(int argc, char** argv) {
  int only = 0;  // 0 = every criterion
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 64;
    }
  }
  const auto want = [&](int n) { return only == 0 || only == n; };

  std::vector<ScenarioCase> cases;
  if (only == 0 || only <= 6) {
    std::printf("acceptance corpus: 20 randomized scenarios (fixed seed) + analytic fixture\n");
    cases = build_cases();
  }
  const std::span<const ScenarioCase> randomized(cases.data(),
                                                 cases.empty() ? 0 : cases.size() - 1);

  if (want(1)) criterion_1(randomized);
  if (want(2)) criterion_2(cases.back());
  if (want(3)) criterion_3(cases);
  if (want(4)) criterion_4(cases);
  if (want(5)) criterion_5(cases);
  if (want(6)) criterion_6(cases);
  if (want(7)) criterion_7();
  if (want(8)) criterion_8();
  if (want(9)) criterion_9();

  if (only == 0) std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures;
}
