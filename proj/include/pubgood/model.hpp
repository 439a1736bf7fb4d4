#ifndef PUBGOOD_MODEL_HPP
#define PUBGOOD_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pubgood/error.hpp"

namespace pubgood {

// ---------------------------------------------------------------------------
// Utility functions
// ---------------------------------------------------------------------------

enum class UtilityKind {
  LogLog,   // U(x,t) = a*ln(1+x) + b*ln(c-t)
  QuadLog,  // U(x,t) = a*x - (p/2)*x^2 + b*ln(c-t)
  External, // caller-supplied evaluator
};

/// Evaluator pair for utilities supplied by an embedding program. `value`
/// returns U(x,t); `grad` returns (dU/dx, dU/dt). Both must be defined on
/// [0,L] x [t_lower, w] (plus a small margin used by finite differences).
struct ExternalUtility {
  std::function<double(double x, double t)> value;
  std::function<std::pair<double, double>(double x, double t)> grad;
};

struct UtilitySpec {
  UtilityKind kind = UtilityKind::LogLog;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double p = 0.0;  // QuadLog only
  ExternalUtility external;

  static UtilitySpec log_log(double a, double b, double c);
  static UtilitySpec quad_log(double a, double p, double b, double c);
  static UtilitySpec make_external(ExternalUtility eval);
};

/// U(x,t). Throws Error(Domain) outside the function's domain
/// (x <= -1 or t >= c for the log terms).
double utility_eval(const UtilitySpec& u, double x, double t);

/// (dU/dx, dU/dt), analytic for the built-in families.
std::pair<double, double> utility_grad(const UtilitySpec& u, double x, double t);

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct AgentSpec {
  double alpha = 1.0;  // welfare weight, > 0
  double w = 1.0;      // private-good endowment, > 0
  UtilitySpec utility;
};

/// Diminishing stepsize zeta_k = r/(k+1): not summable, square-summable.
struct StepsizeSchedule {
  double r = 1.0;
};

double stepsize(const StepsizeSchedule& sched, std::int64_t k);

struct Scenario {
  std::vector<AgentSpec> agents;
  double L = 1.0;  // public-good cap
  StepsizeSchedule stepsize;
};

/// A Scenario whose assumptions have been checked, annotated with the
/// per-agent contribution floor T_max_i = sum_{j != i} w_j. Immutable once
/// constructed; safe to share across threads.
class ValidatedScenario {
public:
  const Scenario& scenario() const { return scenario_; }
  std::size_t agent_count() const { return scenario_.agents.size(); }
  double cap() const { return scenario_.L; }
  const StepsizeSchedule& stepsize_schedule() const { return scenario_.stepsize; }
  const AgentSpec& agent(std::size_t idx) const { return scenario_.agents[idx]; }

  /// T_max_i for the 0-based agent `idx`; the contribution box is
  /// [-t_max(idx), agent(idx).w].
  double t_max(std::size_t idx) const { return t_max_[idx]; }
  double total_endowment() const { return total_endowment_; }

private:
  friend ValidatedScenario validate_scenario(const Scenario& s);
  ValidatedScenario(Scenario s, std::vector<double> t_max, double total_w)
      : scenario_(std::move(s)), t_max_(std::move(t_max)), total_endowment_(total_w) {}

  Scenario scenario_;
  std::vector<double> t_max_;
  double total_endowment_;
};

/// Checks the model assumptions (positive weights/endowments, parameter
/// sanity, utilities increasing in x, decreasing in t, jointly strictly
/// concave on a 21x21 sample grid over [0,L] x [-T_max_i, w_i]) and computes
/// the per-agent T_max_i. Throws Error(Validation) listing every violated
/// assumption with the offending agent index.
ValidatedScenario validate_scenario(const Scenario& s);

/// Sample-grid density used by validate_scenario.
inline constexpr int kValidationGridPoints = 21;

// ---------------------------------------------------------------------------
// Dual variables and agent messages
// ---------------------------------------------------------------------------

/// Multipliers held by the planner: lambda_i >= 0 for the financing
/// constraints (sum_j t_j >= x_i) and mu_ij, i > j, for the pairwise
/// agreement constraints (x_i = x_j). mu is stored flat in lexicographic
/// (i,j) order: (2,1), (3,1), (3,2), (4,1), ...
struct DualState {
  std::vector<double> lambda;
  std::vector<double> mu;
};

/// Flat position of mu_ij for 1-based agent ids with i > j.
/// Bijection onto {0, ..., m(m-1)/2 - 1} in the order declared above.
std::size_t mu_index(std::size_t i, std::size_t j, std::size_t m);

/// c_i = sum_{j<i} mu_ij - sum_{j>i} mu_ji, the net agreement price seen by
/// agent i. Touches only row/column i of the flat mu vector; the c_i sum to
/// zero over all agents.
double mu_coefficient(std::size_t i, std::span<const double> mu, std::size_t m);

/// One agent's reply per iteration: its preferred public-good level, its
/// contribution, and the optimal value g_i of its relaxed objective.
struct AgentResponse {
  double x_bar = 0.0;
  double t_bar = 0.0;
  double g = 0.0;
};

// ---------------------------------------------------------------------------
// Worst-case subgradient bound
// ---------------------------------------------------------------------------

/// (4m + m(m+1)^2) * max{L, w_1, ..., w_m}^2 -- the constant the trace
/// diagnostics compare ||s||^2 + ||r||^2 against. Derived assuming the
/// financing constraint holds at the agents' replies; early iterates with
/// all-zero lambda can exceed it (the floor-clamped contributions then make
/// |sum_j t_j| as large as (m-1) * sum_j w_j).
double upsilon_bound(const ValidatedScenario& s);

}  // namespace pubgood

#endif
