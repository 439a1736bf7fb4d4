#ifndef PUBGOOD_SIM_HPP
#define PUBGOOD_SIM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pubgood/model.hpp"
#include "pubgood/oracle.hpp"
#include "pubgood/planner.hpp"

namespace pubgood {

/// One row of the run trace.
struct IterationRecord {
  std::int64_t k = 0;
  double g = 0.0;               // aggregate dual value at k
  double g_min = 0.0;           // best value seen so far
  double s_norm_sq = 0.0;       // ||financing subgradient||^2
  double r_norm_sq = 0.0;       // ||agreement subgradient||^2
  double payability_gap = 0.0;  // max_i (x_bar_i - sum_j t_bar_j)^+
  double coherence_gap = 0.0;   // max_{i>j} |x_bar_i - x_bar_j|
  double zeta = 0.0;            // stepsize used at k
};

using Trace = std::vector<IterationRecord>;

/// Records are kept for every iteration below this index, then every 10th.
inline constexpr std::int64_t kTraceDecimationStart = 1000000;

/// The composite stopping test: residuals at the best iterate within the
/// feasibility tolerances AND best value improved by less than eps_stall
/// over the last `window` recorded iterations.
struct TerminationCriteria {
  std::optional<double> eps_feasible;   // default 1e-2 * max(1, L)
  std::optional<double> eps_coherence;  // default 1e-2 * max(1, L)
  double eps_stall = 1e-6;
  int window = 500;
};

struct RunOptions {
  std::int64_t max_iters = 100000;
  TerminationCriteria term;
  std::optional<std::vector<double>> mu0;  // default all-zero
  double mu_step_scale = 1.0;  // optional separate coefficient for the mu family
};

enum class TerminationReason {
  ResidualsMet,  // composite test fired before the iteration budget
  Stalled,       // budget exhausted with residuals met (value still moving)
  MaxIters,      // budget exhausted, residuals not met
};

const char* to_string(TerminationReason r);

struct RunResult {
  double x_star = 0.0;          // mean of the x_bar_i at the best iterate
  std::vector<double> x_i;      // per-agent levels at the best iterate
  std::vector<double> t;        // contributions at the best iterate
  DualState duals;              // best-iterate multipliers
  std::vector<double> charges;  // final per-agent charges gamma_i
  std::vector<double> g_i;      // per-agent values at the best iterate
  double g_min = 0.0;
  std::int64_t k_min = -1;
  std::int64_t iterations = 0;
  TerminationReason termination = TerminationReason::MaxIters;
  double payability_residual = 0.0;  // at the best iterate
  double coherence_residual = 0.0;
};

struct RunOutput {
  RunResult result;
  Trace trace;
};

/// Executes the full exchange: initialize duals, then per iteration announce
/// -> solve all agent subproblems -> aggregate -> best-update -> projected
/// dual updates, recording one trace row per iteration, and finally settle
/// charges from the best iterate. Deterministic: identical inputs produce
/// identical traces.
RunOutput run(const ValidatedScenario& s, const RunOptions& opts = {});

bool check_termination(std::span<const IterationRecord> trace, const IterationRecord& best,
                       const TerminationCriteria& term, double L);

/// Inputs of the optimality-gap envelope.
struct GapBoundConfig {
  double lambda_bound = 0.0;  // bound on squared start-to-solution dual distance
  double upsilon = 0.0;       // from upsilon_bound
  bool lambda_estimated = false;
};

/// (lambda_bound + upsilon * sum_{i<=k} zeta_i^2) / (2 * sum_{i<=k} zeta_i),
/// the guaranteed ceiling on g_min(k) minus the optimal dual value.
double gap_bound(std::int64_t k, const GapBoundConfig& cfg, const StepsizeSchedule& sched);

/// Runs a reference exchange 10x the given budget and returns
/// 2 * ||(lambda(0), mu(0)) - best reference duals||^2 (floored at 1e-12).
GapBoundConfig estimate_gap_bound_config(const ValidatedScenario& s, const RunOptions& opts);

struct DiagnosticsReport {
  double oracle_value = 0.0;
  double duality_gap = 0.0;   // g_min(final) - oracle value
  double relative_gap = 0.0;  // |gap| / (1 + |oracle value|)
  bool weak_duality_ok = false;
  double weak_duality_min_margin = 0.0;  // min_k g(k) - oracle value
  bool gmin_monotone = false;
  bool upsilon_ok = false;
  std::int64_t upsilon_first_violation_k = -1;
  double upsilon = 0.0;
  double upsilon_max_ratio = 0.0;  // max_k (||s||^2+||r||^2) / upsilon
  bool envelope_ok = false;
  double envelope_min_margin = 0.0;  // min_k envelope(k) - (g_min(k) - oracle)
  double lambda_bound = 0.0;
  bool lambda_estimated = false;
  double payability_residual = 0.0;
  double coherence_residual = 0.0;
  double budget_residual = 0.0;           // |sum_i gamma_i|
  double budget_bound = 0.0;              // sum(lambda*) * (coh + pay) + 1e-6
  double charge_identity_max_error = 0.0; // max_i |g_i + gamma_i - alpha_i U_i|
};

/// Compares a completed run against the centralized optimum: duality gaps,
/// the envelope at every recorded k, the subgradient-norm ceiling, and the
/// settlement identities.
DiagnosticsReport diagnostics(const ValidatedScenario& s, const RunOutput& out,
                              const OracleResult& oracle, const GapBoundConfig& cfg);

}  // namespace pubgood

#endif
